"""Samplers for the four point processes on the sphere.

* ``IID``: independent uniform points on S^d.
* ``Spherical``: stereographic image of the eigenvalues of A^{-1} B for
  independent complex Gaussian matrices A and B.
* ``Harmonic``: projection DPP onto spherical harmonics of degree <= L.
* ``Jittered``: one uniform point in every region of an EQ(2, N) partition.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .dpp import harmonic_basis, hkpv_sample
from .eq import EqPartition
from .errors import DomainError, SamplingError
from .geometry import inverse_stereographic, uniform_sphere


def sample_iid(d, N, rng):
    if N < 1:
        raise DomainError("need at least one point")
    return uniform_sphere(np.random.default_rng(rng), N, d)


def sample_spherical(N, rng, max_retries=10):
    """Spherical ensemble of N points on S^2.

    The generalised eigenproblem B v = lambda A v is solved directly, so
    A is never inverted. A pencil with non-finite eigenvalues (A numerically
    singular) is redrawn.
    """
    if N < 1:
        raise DomainError("need at least one point")
    rng = np.random.default_rng(rng)
    for _ in range(max_retries):
        a = rng.standard_normal((2, N, N)) + 1j * rng.standard_normal((2, N, N))
        lam = scipy.linalg.eigvals(a[1], a[0])
        if np.all(np.isfinite(lam)):
            return inverse_stereographic(lam)
    raise SamplingError(f"singular pencil in {max_retries} consecutive draws")


def sample_harmonic(L, rng):
    if L < 0:
        raise DomainError("degree must be non-negative")
    return hkpv_sample(harmonic_basis(L), rng).points


def sample_jittered(p, rng):
    rng = np.random.default_rng(rng)
    return p.sample_regions(np.arange(p.n_regions), rng)


@dataclass(frozen=True)
class IID:
    d: int
    N: int

    @property
    def n_points(self):
        return self.N

    @property
    def label(self):
        return f"iid(d={self.d},N={self.N})"

    def sample(self, rng):
        return sample_iid(self.d, self.N, rng)


@dataclass(frozen=True)
class Spherical:
    N: int
    d = 2

    @property
    def n_points(self):
        return self.N

    @property
    def label(self):
        return f"spherical(N={self.N})"

    def sample(self, rng):
        return sample_spherical(self.N, rng)


@dataclass(frozen=True)
class Harmonic:
    L: int
    d = 2

    @property
    def n_points(self):
        return (self.L + 1) ** 2

    @property
    def label(self):
        return f"harmonic(L={self.L},N={self.n_points})"

    def sample(self, rng):
        return sample_harmonic(self.L, rng)


@dataclass(frozen=True)
class Jittered:
    partition: EqPartition
    d = 2

    @property
    def n_points(self):
        return self.partition.n_regions

    @property
    def label(self):
        return f"jittered(EQ(2,{self.n_points}))"

    def sample(self, rng):
        return sample_jittered(self.partition, rng)


# ------------------------------------------------------------------ CSV

def _header(dim):
    return ["x", "y", "z"] if dim == 3 else [f"x{i}" for i in range(dim)]


def write_points_csv(fh, point_sets):
    """Write point sets as CSV with 17 significant digits.

    A single set gets the header ``x,y,z`` (``x0..xd`` off S^2); several sets
    get a leading ``rep`` column.
    """
    point_sets = [np.asarray(p) for p in point_sets]
    dim = point_sets[0].shape[1]
    multi = len(point_sets) > 1
    w = csv.writer(fh, lineterminator="\n")
    w.writerow((["rep"] if multi else []) + _header(dim))
    for r, pts in enumerate(point_sets):
        for row in pts:
            vals = [f"{v:.17g}" for v in row]
            w.writerow(([r] if multi else []) + vals)


def read_points_csv(fh):
    """Inverse of :func:`write_points_csv`; returns a list of (n, dim) arrays."""
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    rows = list(csv.reader(fh))
    if not rows:
        raise DomainError("empty point file")
    head, body = rows[0], rows[1:]
    if head and head[0] == "rep":
        reps = {}
        for row in body:
            reps.setdefault(int(row[0]), []).append([float(v) for v in row[1:]])
        return [np.array(reps[k]) for k in sorted(reps)]
    return [np.array([[float(v) for v in row] for row in body])]
