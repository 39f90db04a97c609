"""Exact sampling of projection determinantal point processes.

A projection DPP is given by N orthonormal functions phi_1..phi_N on a
probability space. Its kernel is K(x, y) = sum_i phi_i(x) conj(phi_i(y)) and
every draw has exactly N points.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.spatial.distance import pdist

from .errors import SamplingError
from .geometry import uniform_sphere
from .harmonics import real_sph_harm


@dataclass(frozen=True)
class ProjectionBasis:
    """Orthonormal functions together with a sampler for the reference measure.

    ``eval`` maps an (n, dim) array of domain points to the (n, N) matrix of
    basis values; ``propose(rng, n)`` draws n points from the reference
    measure. ``kernel_bound`` is an upper bound on K(x, x) and defaults to N,
    which is exact when the diagonal is constant.
    """

    n_functions: int
    eval: Callable
    propose: Callable
    reference_measure: str = "normalized surface measure"
    kernel_bound: Optional[float] = None

    @property
    def bound(self):
        return float(self.kernel_bound or self.n_functions)


@dataclass(frozen=True)
class DppSample:
    points: np.ndarray
    seed: Optional[int]
    proposals_used: int


def kernel_from_basis(b, x, y):
    """K(x, y) for matching rows of ``x`` and ``y``."""
    fx = b.eval(np.atleast_2d(x))
    fy = b.eval(np.atleast_2d(y))
    k = np.sum(fx * np.conj(fy), axis=-1)
    if not np.iscomplexobj(k):
        k = k.real
    return k[0] if np.ndim(x) == 1 else k


def sphere_basis(funcs, kernel_bound=None):
    """Projection basis on S^2 from a list of vectorised functions of points."""
    return ProjectionBasis(
        len(funcs),
        lambda X: np.stack([f(X) for f in funcs], axis=1),
        lambda rng, n: uniform_sphere(rng, n, 2),
        kernel_bound=kernel_bound,
    )


def harmonic_basis(L):
    """Real spherical harmonics of degree <= L: N = (L + 1)^2 functions."""
    return ProjectionBasis((L + 1) ** 2,
                           lambda X: real_sph_harm(L, X),
                           lambda rng, n: uniform_sphere(rng, n, 2))


def hkpv_sample(b, rng, max_proposals=None):
    """Draw one configuration from the projection DPP of basis ``b``.

    Points are chosen one at a time. Given k chosen points, the next has
    density (K(x, x) - v_k(x)) / (N - k), where v_k(x) is the squared length
    of the projection of the feature vector phi(x) onto the span of the
    chosen feature vectors. Each step is a rejection sampler against the
    reference measure that accepts x with probability
    (K(x, x) - v_k(x)) / kernel_bound; proposals are drawn in batches.

    Raises
    ------
    SamplingError
        If more than ``max_proposals`` (default 10^6 N) proposals are used,
        or two output points coincide.
    """
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    N = b.n_functions
    bound = b.bound
    budget = max_proposals or 10**6 * N
    basis = None  # orthonormal rows spanning the chosen feature vectors
    chosen_pts = []
    chosen_feat = []
    used = 0
    for k in range(N):
        batch = max(8, math.ceil(2 * bound / (N - k)))
        while True:
            X = b.propose(rng, batch)
            F = b.eval(X)
            R = F if basis is None else _residual(F, basis)
            w = np.sum(np.abs(R) ** 2, axis=1)
            hits = np.flatnonzero(rng.uniform(0.0, bound, batch) < w)
            if hits.size:
                j = hits[0]
                used += j + 1
                break
            used += batch
            if used > budget:
                raise SamplingError(
                    f"no acceptance after {used} proposals at step {k} of {N}")
        chosen_pts.append(X[j])
        chosen_feat.append(F[j])
        r = R[j] / math.sqrt(w[j])
        if basis is not None:
            r = _residual(r[None, :], basis)[0]
        nrm = np.linalg.norm(r)
        if nrm < 1e-8:
            # the chosen set is nearly rank deficient; rebuild from scratch
            q, _ = np.linalg.qr(np.array(chosen_feat).conj().T)
            basis = q.conj().T
        else:
            r = r / nrm
            basis = r[None, :] if basis is None else np.vstack([basis, r])
    points = np.array(chosen_pts)
    if N > 1 and pdist(points).min() <= 1e-12:
        raise SamplingError("duplicate points in DPP sample")
    return DppSample(points, seed, used)


def _residual(F, basis):
    # two passes of classical Gram-Schmidt
    R = F - (F @ basis.conj().T) @ basis
    return R - (R @ basis.conj().T) @ basis
