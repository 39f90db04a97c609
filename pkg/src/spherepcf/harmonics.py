"""Real spherical harmonics on S^2, orthonormal for the normalised area measure."""

import math

import numpy as np


def _legendre_table(L, cos_t, sin_t):
    """Fully normalised associated Legendre functions Pbar[l, m] (geodesy convention).

    Pbar_lm^2 (cos or sin m phi)^2 averages to 1 over the sphere, so no further
    scaling is needed for an orthonormal basis.
    """
    P = np.zeros((L + 1, L + 1) + cos_t.shape)
    P[0, 0] = 1.0
    for m in range(1, L + 1):
        f = math.sqrt(3.0) if m == 1 else math.sqrt((2 * m + 1) / (2 * m))
        P[m, m] = f * sin_t * P[m - 1, m - 1]
    for m in range(0, L):
        P[m + 1, m] = math.sqrt(2 * m + 3) * cos_t * P[m, m]
        for l in range(m + 2, L + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) * (2 * l + 1)
                          / ((l * l - m * m) * (2 * l - 3)))
            P[l, m] = a * cos_t * P[l - 1, m] - b * P[l - 2, m]
    return P


def real_sph_harm(L, points):
    """All real harmonics of degree <= L at ``points`` (shape (n, 3)).

    Returns an (n, (L+1)^2) array; columns run over l = 0..L and, within a
    degree, m = 0 followed by (cos m phi, sin m phi) pairs for m = 1..l.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = p[:, 0], p[:, 1], p[:, 2]
    sin_t = np.hypot(x, y)
    phi = np.arctan2(y, x)
    P = _legendre_table(L, z, sin_t)
    m = np.arange(1, L + 1)[:, None]
    cos_m = np.cos(m * phi)
    sin_m = np.sin(m * phi)
    cols = []
    for l in range(L + 1):
        cols.append(P[l, 0])
        for k in range(1, l + 1):
            cols.append(P[l, k] * cos_m[k - 1])
            cols.append(P[l, k] * sin_m[k - 1])
    return np.stack(cols, axis=1)
