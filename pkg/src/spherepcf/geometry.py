"""Geometry of the unit sphere S^d embedded in R^(d+1).

Points are plain numpy arrays: a single point has shape ``(d+1,)`` and a
point set has shape ``(n, d+1)``. Areas are normalised so the whole sphere
has area 1.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .specfun import QuadratureSpec, gamma_fn, integrate

NORM_TOL = 1e-12


def sphere_point(coords):
    """Validate ``coords`` as unit vector(s) and return them as a float array."""
    p = np.asarray(coords, dtype=float)
    if p.ndim == 0 or p.shape[-1] < 2:
        raise DomainError("a sphere point needs at least two coordinates")
    if np.any(np.abs(np.linalg.norm(p, axis=-1) - 1) > NORM_TOL):
        raise DomainError("coordinates are not unit norm")
    return p


@dataclass(frozen=True)
class CapSpec:
    """Open cap {y : geodesic(center, y) < angular_radius}."""

    center: np.ndarray
    angular_radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", sphere_point(self.center))
        if not 0 <= self.angular_radius <= math.pi:
            raise DomainError("cap radius must lie in [0, pi]")

    @property
    def d(self):
        return self.center.shape[-1] - 1

    @property
    def area(self):
        return cap_area(self.d, self.angular_radius)

    def contains(self, points):
        return distance(points, self.center) < self.angular_radius


def distance(x, y, kind="geodesic"):
    """Geodesic angle or chordal (euclidean) distance between points.

    The geodesic angle is computed as 2 atan2(|x - y|, |x + y|), which is
    well conditioned both for nearly equal and for nearly antipodal points.
    Broadcasts over leading axes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise DomainError(
            f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]} coordinates")
    chord = np.linalg.norm(x - y, axis=-1)
    if kind == "euclidean":
        return chord
    if kind != "geodesic":
        raise DomainError(f"unknown distance kind {kind!r}")
    return 2 * np.arctan2(chord, np.linalg.norm(x + y, axis=-1))


def omega(d):
    """Surface area of S^d."""
    return 2 * math.pi ** ((d + 1) / 2) / gamma_fn((d + 1) / 2)


def area_ratio(d):
    """omega_{d-1} / omega_d, the density of the polar angle on S^d."""
    return omega(d - 1) / omega(d)


def cap_area(d, phi):
    """Normalised area of a cap of angular radius ``phi`` on S^d."""
    if d < 1:
        raise DomainError("sphere dimension must be at least 1")
    if not 0 <= phi <= math.pi:
        raise DomainError(f"cap radius {phi} outside [0, pi]")
    if d == 2:
        return math.sin(phi / 2) ** 2
    if d == 1:
        return phi / math.pi
    val = integrate(lambda t: np.sin(t) ** (d - 1), 0.0, phi,
                    QuadratureSpec(abs_tol=1e-14))
    return min(1.0, area_ratio(d) * val)


def cap_radius(d, area):
    """Inverse of :func:`cap_area` in the radius."""
    if not 0 <= area <= 1:
        raise DomainError(f"cap area {area} outside [0, 1]")
    if d == 2:
        return 2 * math.asin(math.sqrt(area))
    if area == 0:
        return 0.0
    if area == 1:
        return math.pi
    return brentq(lambda phi: cap_area(d, phi) - area, 0.0, math.pi,
                  xtol=1e-15, rtol=4 * np.finfo(float).eps)


def lens_area(rho, tau):
    """Normalised area of a hemisphere intersected with a cap of radius rho.

    The cap centre lies ``tau`` beyond the hemisphere's boundary circle, so
    tau = 0 puts it on the boundary and tau >= rho makes the sets disjoint.
    Only S^2 is handled.
    """
    if not 0 <= rho < math.pi / 2:
        raise DomainError("lens_area needs 0 <= rho < pi/2")
    if tau < 0:
        raise DomainError("lens_area needs tau >= 0")
    if tau >= rho:
        return 0.0
    beta = math.asin(math.sin(tau) / math.sin(rho))
    # 2 atan(cot(beta) / cos(rho)), written to stay finite as beta -> 0
    alpha = 2 * math.atan2(math.cos(beta), math.sin(beta) * math.cos(rho))
    return (math.pi - alpha * math.cos(rho) - 2 * beta) / (4 * math.pi)


def funk_hecke(f, d, spec=None):
    """Average of f(<x, y>) over x uniform on S^d, for any fixed y.

    Integrates in the polar angle, so the weight (1 - t^2)^(d/2 - 1) never
    becomes singular.
    """
    spec = spec or QuadratureSpec(abs_tol=1e-12)
    val = integrate(lambda t: f(np.cos(t)) * np.sin(t) ** (d - 1), 0.0, math.pi, spec)
    return area_ratio(d) * val


def tube_area(curve_length, theta):
    """Normalised area of the theta-neighbourhood of a closed curve on S^2.

    Valid only while the tube does not overlap itself.
    """
    if curve_length < 0:
        raise DomainError("curve length must be non-negative")
    return 2 * curve_length * math.sin(theta) / (4 * math.pi)


def inverse_stereographic(z):
    """Map complex numbers to S^2, projecting from the north pole.

    z = 0 goes to the south pole and the unit circle to the equator.
    """
    z = np.asarray(z, dtype=complex)
    r2 = (z * np.conj(z)).real
    denom = 1 + r2
    out = np.stack([2 * z.real, 2 * z.imag, r2 - 1], axis=-1) / denom[..., None]
    # huge |z| loses the last bits of the norm; renormalise
    return out / np.linalg.norm(out, axis=-1, keepdims=True)


def spherical_coords(points):
    """Colatitude in [0, pi] and longitude in [0, 2 pi) of points on S^2."""
    p = np.asarray(points, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    theta = np.arctan2(np.hypot(x, y), z)
    phi = np.mod(np.arctan2(y, x), 2 * math.pi)
    return theta, phi


def from_spherical(theta, phi):
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def uniform_sphere(rng, n, d=2):
    """n i.i.d. uniform points on S^d from normalised Gaussian vectors."""
    g = rng.standard_normal((n, d + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_in_caps(rng, centers, rho):
    """One uniform point in the cap C(c, rho) for each row c of ``centers`` (S^2).

    The polar angle is drawn through its exact area distribution, with
    1 - cos uniform on [0, 2 sin^2(rho/2)].
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    n = len(centers)
    h = rng.uniform(0.0, 2 * math.sin(rho / 2) ** 2, n)
    cos_g = 1 - h
    sin_g = np.sqrt(h * (2 - h))
    psi = rng.uniform(0.0, 2 * math.pi, n)
    e1, e2 = _tangent_frame(centers)
    return (centers * cos_g[:, None]
            + sin_g[:, None] * (np.cos(psi)[:, None] * e1 + np.sin(psi)[:, None] * e2))


def _tangent_frame(centers):
    # pick the coordinate axis least aligned with each centre
    axis = np.zeros_like(centers)
    axis[np.arange(len(centers)), np.argmin(np.abs(centers), axis=1)] = 1.0
    e1 = np.cross(centers, axis)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(centers, e1)
    return e1, e2
