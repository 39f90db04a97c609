"""Reference values of E[G_{s,N}] and its N -> infinity limits.

Closed forms where they exist, one-dimensional quadrature for the harmonic
ensembles, and Monte Carlo integration of the boundary-layer functional
for jittered sampling.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .geometry import area_ratio, cap_area, sample_in_caps
from .specfun import (QuadratureSpec, bessel_pcf_remainder, binom, integrate,
                      jacobi_poly)

INF = math.inf
# default for the unspecified constant of the small-s jittered bound
C2_DEFAULT = 30.0
# largest s at which the small-s jittered bound is claimed
JITTER_SMALL_S_MAX = 0.25
EQ_PERIMETER_CONSTANT = 8 * math.sqrt(math.pi)


# ------------------------------------------------------------------ i.i.d.

def iid_pcf_limit(d, s):
    _check_s(s)
    return area_ratio(d) * s**d / d


def iid_pcf_finite(d, N, s, distance_kind="geodesic"):
    """Exact E[G_{s,N}] for N i.i.d. uniform points: (N - 1) sigma(cap)."""
    _check_s(s)
    r = s * N ** (-1 / d)
    return (N - 1) * cap_area(d, _geodesic_radius(r, distance_kind))


def _geodesic_radius(r, distance_kind):
    if distance_kind == "euclidean":
        return 2 * math.asin(min(1.0, r / 2))
    if distance_kind != "geodesic":
        raise DomainError(f"unknown distance kind {distance_kind!r}")
    return min(r, math.pi)


def _check_s(s):
    if s < 0:
        raise DomainError("s must be non-negative")


# --------------------------------------------------------------- spherical

def spherical_pcf(N, s):
    """Spherical ensemble, euclidean distance; ``N = inf`` gives the limit.

    Finite N: s^2/4 - (1 - (1 - s^2/(4N))^N). Limit: s^2/4 - 1 + exp(-s^2/4).
    """
    _check_s(s)
    x = s * s / 4
    if N == INF:
        return x + math.expm1(-x)
    if x > N:
        raise DomainError(f"s = {s} exceeds the sphere diameter for N = {N}")
    if x == N:
        return x - 1.0
    return x + math.expm1(N * math.log1p(-x / N))


# ---------------------------------------------------------------- harmonic

def harmonic_dimension(d, L):
    """Dimension of the spherical harmonics of degree <= L on S^d."""
    return (2 * L + d) * math.comb(d + L - 1, L) // d


def harmonic_pcf_finite(d, L, s, spec=None):
    """Exact E[G_{s,N}] for the harmonic ensemble of degree L (geodesic distance)."""
    _check_s(s)
    N = harmonic_dimension(d, L)
    phi_max = s * N ** (-1 / d)
    if phi_max > math.pi:
        raise DomainError(f"s = {s} exceeds the sphere diameter for N = {N}")
    if s == 0:
        return 0.0
    a, b = d / 2, d / 2 - 1
    p1 = binom(L, a)
    scale = N * area_ratio(d)
    spec = spec or QuadratureSpec(abs_tol=1e-10 / scale)

    def f(phi):
        ratio = jacobi_poly(L, a, b, np.cos(phi)) / p1
        return (1 - ratio * ratio) * np.sin(phi) ** (d - 1)

    return scale * integrate(f, 0.0, phi_max, spec)


def harmonic_pcf_limit(d, s):
    """N -> infinity limit of E[G_{s,N}] for the harmonic ensemble on S^d.

    With nu = d/2 and I(x) the integral of J_nu(t)^2/t over [0, x], the limit
    is (omega_{d-1}/omega_d) [s^d/d - c_d 2^d I(s (Gamma(d+1)/2)^{1/d})]
    where c_d = 2 Gamma(d/2+1)^2 / Gamma(d+1). The leading term of I cancels
    s^d/d exactly, so only the remainder of I is evaluated.
    """
    _check_s(s)
    if s == 0:
        return 0.0
    nu = d / 2
    c = 2 * math.gamma(nu + 1) ** 2 / math.gamma(d + 1)
    x = s * (math.gamma(d + 1) / 2) ** (1 / d)
    return -area_ratio(d) * c * 2**d * bessel_pcf_remainder(nu, x)


def harmonic_pcf_small_s(d, s):
    """Leading small-s term of the harmonic limit."""
    return (area_ratio(d) * (math.gamma(d + 1) / 2) ** (2 / d)
            * s ** (d + 2) / (d + 2) ** 2)


# ------------------------------------------------------- projective spaces

def _lpoch(a, n):
    return math.lgamma(a + n) - math.lgamma(a)


def projective_dimension(alpha, beta, L):
    """(alpha+beta+2)_L (alpha+2)_L / (L! (beta+1)_L)."""
    return round(math.exp(_lpoch(alpha + beta + 2, L) + _lpoch(alpha + 2, L)
                          - math.lgamma(L + 1) - _lpoch(beta + 1, L)))


def projective_constant(alpha, beta):
    """C_{alpha,beta} = 2 Gamma(alpha+beta+2) / (Gamma(alpha+1) Gamma(beta+1))."""
    return (2 * math.gamma(alpha + beta + 2)
            / (math.gamma(alpha + 1) * math.gamma(beta + 1)))


def projective_growth(alpha, beta):
    """K_{alpha,beta} with N ~ K L^D."""
    return math.gamma(beta + 1) / (math.gamma(alpha + beta + 2) * math.gamma(alpha + 2))


def _check_projective(alpha, D):
    if abs(alpha - (D / 2 - 1)) > 1e-12:
        raise DomainError(f"alpha = {alpha} is inconsistent with D = {D}")


def projective_pcf(alpha, beta, D, L, s, spec=None):
    """Harmonic ensemble on a projective space of real dimension D.

    Finite L is the exact quadrature in the geodesic distance theta in
    [0, pi/2], with kernel P_L^{(alpha+1, beta)}(cos 2 theta). ``L = inf``
    returns the small-s leading term 4 C K^{-2/D} s^{D+2} / (D+2)^2.
    """
    _check_projective(alpha, D)
    _check_s(s)
    C = projective_constant(alpha, beta)
    if L == INF:
        K = projective_growth(alpha, beta)
        return 4 * C * K ** (-2 / D) * s ** (D + 2) / (D + 2) ** 2
    N = projective_dimension(alpha, beta, L)
    t_max = s * N ** (-1 / D)
    if t_max > math.pi / 2:
        raise DomainError(f"s = {s} exceeds the diameter pi/2 for N = {N}")
    if s == 0:
        return 0.0
    p1 = binom(L, alpha + 1)
    scale = N * C
    spec = spec or QuadratureSpec(abs_tol=1e-10 / scale)

    def f(t):
        ratio = jacobi_poly(L, alpha + 1, beta, np.cos(2 * t)) / p1
        return (1 - ratio * ratio) * np.sin(t) ** (2 * alpha + 1) * np.cos(t) ** (2 * beta + 1)

    return scale * integrate(f, 0.0, t_max, spec)


def projective_pcf_large_s(alpha, beta, D, s):
    """Large-s main term C_{alpha,beta} s^D / D of the projective limit."""
    _check_projective(alpha, D)
    return projective_constant(alpha, beta) * s**D / D


# ---------------------------------------------------------------- jittered

def jittered_pcf_large_s(d, s):
    """Limit for s beyond the diameter constant of the partition family."""
    return iid_pcf_limit(d, s) - 1


def jittered_pcf_covering(N, s, distance_kind="geodesic"):
    """Exact E[G_{s,N}] for jittered sampling when every cap C(x, s N^{-1/2})
    with x in a region contains that whole region: N sigma(C) - 1.

    With euclidean distance this equals s^2/4 - 1 for every such N.
    """
    _check_s(s)
    return N * cap_area(2, _geodesic_radius(s / math.sqrt(N), distance_kind)) - 1


def jittered_pcf_small_s(s, c2=C2_DEFAULT):
    """Small-s value s^3/(8 pi^2) and its error bound c2 s^4, for 0 <= s < 1/4."""
    if not 0 <= s < JITTER_SMALL_S_MAX:
        raise DomainError(f"the small-s regime needs 0 <= s < 1/4, got {s}")
    return s**3 / (8 * math.pi**2), c2 * s**4


def jittered_pcf_main_term(s, perimeter_constant=EQ_PERIMETER_CONSTANT):
    """Boundary-layer main term for a partition of total perimeter c sqrt(N).

    Each region contributes L(dA) rho^3 / (24 pi^2) with rho = s / sqrt(N),
    so E[G] ~ c s^3 / (24 pi^2). For EQ(2, N), c = 8 sqrt(pi).
    """
    _check_s(s)
    return perimeter_constant * s**3 / (24 * math.pi**2)


def cap_partition_main_term(s):
    """Main term for hypothetical regions that are all caps of area 1/N."""
    return jittered_pcf_main_term(s, 4 * math.pi)


def m_rho(p, r, rho, rng, n_samples):
    """Monte Carlo estimate of the integral over x in A of sigma(C(x, rho) minus A).

    x is uniform in the region, y uniform in the cap around x; the
    integrand is sigma(C(rho)) P(y not in A). Returns (mean, stderr).
    """
    if not 0 < rho < math.pi:
        raise DomainError("rho must lie in (0, pi)")
    rng = np.random.default_rng(rng)
    idx = p.region_index(r)
    area = float(p.region_areas()[idx])
    x = p.sample_regions(np.full(n_samples, idx), rng)
    y = sample_in_caps(rng, x, rho)
    miss = (p.locate(y) != idx).astype(float)
    vals = area * cap_area(2, rho) * miss
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_samples))


def jittered_pcf_numeric(p, s, rng, n_samples, chunk=2_000_000):
    """E[G_{s,N}] for jittered sampling on ``p`` as N sum_i M_rho(A_i).

    The budget is split evenly over regions (stratified). Returns
    (mean, stderr).
    """
    _check_s(s)
    N = p.n_regions
    if s == 0:
        return 0.0, 0.0
    rng = np.random.default_rng(rng)
    rho = min(s / math.sqrt(N), math.pi)
    per_region = max(2, n_samples // N)
    hits = np.zeros(N)
    rounds_per_chunk = max(1, chunk // N)
    done = 0
    while done < per_region:
        k = min(rounds_per_chunk, per_region - done)
        idx = np.tile(np.arange(N), k)
        x = p.sample_regions(idx, rng)
        y = sample_in_caps(rng, x, rho)
        hits += np.bincount(idx[p.locate(y) != idx], minlength=N)
        done += k
    cap = cap_area(2, rho)
    frac = hits / per_region
    var_i = frac * (1 - frac) * per_region / (per_region - 1)
    mean = cap * frac.sum()
    se = cap * math.sqrt(var_i.sum() / per_region)
    return float(mean), float(se)


# ------------------------------------------------------------ curves / CSV

@dataclass(frozen=True)
class OracleCurve:
    s_values: tuple
    values: tuple
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.s_values) != len(self.values):
            raise DomainError("oracle grid and values differ in length")

    @property
    def params_text(self):
        return ";".join(f"{k}={v}" for k, v in self.params.items())


def write_oracle_csv(fh, curve):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["s", "value", "kind", "params"])
    for s, v in zip(curve.s_values, curve.values):
        w.writerow([repr(float(s)), repr(float(v)), curve.kind, curve.params_text])


def read_oracle_csv(fh):
    rows = list(csv.DictReader(fh))
    if not rows:
        raise DomainError("no oracle rows in file")
    params = dict(kv.split("=", 1) for kv in rows[0]["params"].split(";") if kv)
    return OracleCurve(tuple(float(r["s"]) for r in rows),
                       tuple(float(r["value"]) for r in rows),
                       rows[0]["kind"], params)
