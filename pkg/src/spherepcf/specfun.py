"""Special functions and adaptive quadrature used by the oracle curves.

Everything here works on floats or numpy arrays of evaluation points;
orders and degrees are scalars.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError

__all__ = [
    "QuadratureSpec",
    "default_quadrature",
    "gamma_fn",
    "binom",
    "jacobi_poly",
    "bessel_j",
    "integrate",
    "bessel_pcf_integral",
    "bessel_pcf_leading",
    "bessel_pcf_remainder",
]

QUAD_TOL_ENV = "SPHEREPCF_QUAD_TOL"


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    max_subdivisions: int = 2**16

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


def default_quadrature():
    """Default spec, honouring the ``SPHEREPCF_QUAD_TOL`` environment variable."""
    tol = os.environ.get(QUAD_TOL_ENV)
    if tol:
        return QuadratureSpec(abs_tol=float(tol))
    return QuadratureSpec()


def gamma_fn(x):
    if not x > 0:
        raise DomainError(f"gamma_fn needs x > 0, got {x}")
    return math.gamma(x)


def binom(n, x):
    """Generalised binomial coefficient C(n + x, n) for real x > -1."""
    return math.exp(math.lgamma(n + x + 1) - math.lgamma(n + 1) - math.lgamma(x + 1))


def jacobi_poly(n, alpha, beta, x):
    """Jacobi polynomial P_n^(alpha, beta)(x), standard normalisation.

    Evaluated by the three-term recurrence in the degree; ``x`` may be an
    array. P_n(1) equals C(n + alpha, n).
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    if alpha <= -1 or beta <= -1:
        raise DomainError("Jacobi parameters must exceed -1")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise DomainError("Jacobi argument must lie in [-1, 1]")
    p_prev = np.ones_like(x)
    if n == 0:
        return _unwrap(p_prev)
    ab = alpha + beta
    p = (alpha + 1) + (ab + 2) * (x - 1) / 2
    for k in range(2, int(n) + 1):
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * x + alpha**2 - beta**2)
        a3 = 2 * (k + alpha - 1) * (k + beta - 1) * c
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
    return _unwrap(p)


def _unwrap(a):
    return float(a) if np.ndim(a) == 0 else a


# ---------------------------------------------------------------- Bessel J

def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for real nu >= 0, x >= 0.

    Uses the Maclaurin series up to x = max(12, 2 nu) and the Hankel
    asymptotic expansion (summed to its smallest term) beyond. Accuracy is
    about 1e-10 relative to the envelope sqrt(2/(pi x)) on [0, 200] for the
    orders needed here (nu <= 4).
    """
    if nu < 0:
        raise DomainError(f"order must be non-negative, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_j needs x >= 0")
    out = np.empty_like(x)
    cross = max(12.0, 2.0 * nu)
    small = x <= cross
    if np.any(small):
        out[small] = _bessel_series(nu, x[small])
    if np.any(~small):
        out[~small] = _bessel_hankel(nu, x[~small])
    return _unwrap(out)


def _bessel_series(nu, x):
    half = x / 2
    safe = np.where(half > 0, half, 1.0)
    log_lead = nu * np.log(safe) - math.lgamma(nu + 1)
    term = np.where(half > 0, np.exp(log_lead), 1.0 if nu == 0 else 0.0)
    total = term.copy()
    q = half * half
    for m in range(1, 500):
        term = -term * q / (m * (m + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) and m > q.max(initial=0) ** 0.5:
            break
    return total


def _bessel_hankel(nu, x):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, 200):
        nxt = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        # stop a point once the divergent tail starts
        live &= np.abs(nxt) < np.abs(term)
        if not live.any():
            break
        term = np.where(live, nxt, 0.0)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p += sign * term
        else:
            q += sign * term
    chi = x - (nu / 2 + 0.25) * math.pi
    return np.sqrt(2 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


# ------------------------------------------------------------- quadrature

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_W_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_G = np.zeros(15)
_W_G[[1, 3, 5]] = _WG[:3]
_W_G[[13, 11, 9]] = _WG[:3]
_W_G[7] = _WG[3]


def _as_vectorized(f):
    probe = np.array([0.25, 0.5])
    try:
        val = np.asarray(f(probe), dtype=float)
        if val.shape == probe.shape:
            return f
    except (TypeError, ValueError):
        pass
    return np.vectorize(f, otypes=[float])


def integrate(f, a, b, spec=None):
    """Adaptive Gauss-Kronrod (7/15) estimate of the integral of f over [a, b].

    ``f`` is called with numpy arrays of nodes when it supports that, and
    element-wise otherwise. Intervals whose local error is within their
    share of ``abs_tol`` are retired; the rest are bisected until the summed
    error bound meets ``abs_tol``.

    Raises
    ------
    QuadratureError
        When the subdivision budget is spent first; carries the best estimate.
    """
    spec = spec or default_quadrature()
    if b < a:
        raise DomainError("integrate needs a <= b")
    if a == b:
        return 0.0
    f = _as_vectorized(f)
    tol = spec.abs_tol
    length = b - a
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    done_val = 0.0
    done_err = 0.0
    splits = 0
    while True:
        mid = (lo + hi) / 2
        half = (hi - lo) / 2
        x = mid[:, None] + half[:, None] * _NODES[None, :]
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        kron = half * (fx @ _W_K)
        gauss = half * (fx @ _W_G)
        err = np.abs(kron - gauss)
        roundoff = 50 * np.finfo(float).eps * half * (np.abs(fx) @ _W_K)
        total = done_val + kron.sum()
        total_err = done_err + err.sum()
        if total_err <= tol:
            return float(total)
        keep = (err > tol * (2 * half) / length) & (err > roundoff)
        done_val += kron[~keep].sum()
        done_err += err[~keep].sum()
        if not keep.any():
            return float(total)
        splits += int(keep.sum())
        if splits > spec.max_subdivisions:
            raise QuadratureError(
                f"tolerance {tol:g} not met after {splits} subdivisions",
                float(total), float(total_err))
        lo_k, mid_k, hi_k = lo[keep], mid[keep], hi[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])


# ------------------------------------------- integral of J_nu(t)^2 / t

# below this the power series is used; above it quadrature continues from it
_PCF_SERIES_MAX = 4.0


def _bessel_pcf_series(nu, x, skip_leading=False):
    """Power series of int_0^x J_nu(t)^2 / t dt.

    The coefficient of (x/2)^(2m+2nu) / (2m+2nu) is
    (-1)^m Gamma(2m+2nu+1) / (m! Gamma(m+2nu+1) Gamma(m+nu+1)^2).
    """
    if x == 0:
        return 0.0
    half_sq = (x / 2) ** 2
    coef = math.exp(-2 * math.lgamma(nu + 1) + 2 * nu * (math.log(x) - math.log(2)))
    total = 0.0 if skip_leading else coef / (2 * nu)
    for m in range(0, 200):
        coef *= -(2 * m + 2 * nu + 1) * (2 * m + 2 * nu + 2) * half_sq / (
            (m + 1) * (m + 2 * nu + 1) * (m + nu + 1) ** 2)
        term = coef / (2 * m + 2 + 2 * nu)
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def bessel_pcf_leading(nu, x):
    """Leading small-x term x^(2nu) / (2^(2nu+1) Gamma(nu+1)^2 nu) of the integral."""
    if x == 0:
        return 0.0
    return math.exp(2 * nu * math.log(x) - (2 * nu + 1) * math.log(2)
                    - 2 * math.lgamma(nu + 1)) / nu


def bessel_pcf_integral(nu, x, spec=None):
    """The integral of J_nu(t)^2 / t over [0, x], for nu > 0.

    Bounded above by 1 / (2 nu), its value at infinity.
    """
    if not nu > 0:
        raise DomainError(f"order must be positive, got {nu}")
    if x < 0:
        raise DomainError("upper limit must be non-negative")
    if x <= _PCF_SERIES_MAX:
        return _bessel_pcf_series(nu, x)
    spec = spec or QuadratureSpec(abs_tol=1e-12)
    head = _bessel_pcf_series(nu, _PCF_SERIES_MAX)
    tail = integrate(lambda t: bessel_j(nu, t) ** 2 / t, _PCF_SERIES_MAX, x, spec)
    return head + tail


def bessel_pcf_remainder(nu, x, spec=None):
    """bessel_pcf_integral minus its leading term, free of cancellation for small x."""
    if x <= _PCF_SERIES_MAX:
        return _bessel_pcf_series(nu, x, skip_leading=True)
    return bessel_pcf_integral(nu, x, spec) - bessel_pcf_leading(nu, x)
