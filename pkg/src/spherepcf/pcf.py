"""Empirical pair correlation statistic and its Monte Carlo expectation.

For N points on S^d the statistic is

    G_{s,N} = (1/N) #{(i, j) ordered, i != j : dist(x_i, x_j) N^{1/d} <= s},

i.e. twice the number of unordered close pairs, divided by N.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DomainError

DISTANCES = ("geodesic", "euclidean")


@dataclass(frozen=True)
class SGrid:
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        if not vals:
            raise DomainError("s-grid is empty")
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise DomainError("s values must be finite and non-negative")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("s values must increase strictly")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @classmethod
    def parse(cls, text):
        """Parse ``start:stop:step`` (stop included) or a comma list."""
        text = text.strip()
        try:
            if ":" in text:
                start, stop, step = (float(t) for t in text.split(":"))
                if step <= 0:
                    raise DomainError("grid step must be positive")
                n = int(math.floor((stop - start) / step + 1e-9)) + 1
                return cls(tuple(start + i * step for i in range(n)))
            return cls(tuple(float(t) for t in text.split(",") if t.strip()))
        except ValueError as exc:
            raise DomainError(f"cannot parse s-grid {text!r}: {exc}") from None


@dataclass(frozen=True)
class PcfEstimate:
    s: float
    mean: float
    stderr: float
    replicates: int
    distance_kind: str
    ensemble: str


def scaled_pair_distances(points, d=None, distance_kind="geodesic"):
    """Sorted distances of all unordered pairs, multiplied by N^{1/d}."""
    pts = np.asarray(points, dtype=float)
    N, dim = pts.shape
    if N < 2:
        raise DomainError("the pair statistic needs at least two points")
    if distance_kind not in DISTANCES:
        raise DomainError(f"unknown distance kind {distance_kind!r}")
    d = dim - 1 if d is None else d
    dist = pdist(pts)
    if distance_kind == "geodesic":
        dist = 2 * np.arcsin(np.minimum(dist / 2, 1.0))
    dist *= N ** (1 / d)
    dist.sort()
    return dist


def g_from_sorted(sorted_dist, N, s):
    """G_{s,N} for each s in ``s`` from pre-sorted scaled pair distances."""
    count = np.searchsorted(sorted_dist, np.asarray(s, dtype=float), side="right")
    return 2 * count / N


def g_statistic(points, s, d=None, distance_kind="geodesic"):
    if s < 0:
        raise DomainError("s must be non-negative")
    sd = scaled_pair_distances(points, d, distance_kind)
    return float(g_from_sorted(sd, len(points), s))


def replicate_rng(seed, r):
    """Generator for replicate ``r`` of a run with master ``seed``.

    Equal to the r-th child of ``np.random.SeedSequence(seed).spawn``, so any
    replicate can be regenerated on its own.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))


def _one_replicate(args):
    spec, grid, kind, seed, r = args
    pts = spec.sample(replicate_rng(seed, r))
    sd = scaled_pair_distances(pts, spec.d, kind)
    return g_from_sorted(sd, len(pts), grid)


def replicate_values(spec, grid, replicates, distance_kind="geodesic", seed=0, jobs=1):
    """(replicates, len(grid)) array of G values, one row per replicate."""
    grid = np.asarray(SGrid(tuple(grid)).values)
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(2**63))
    tasks = [(spec, grid, distance_kind, seed, r) for r in range(replicates)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(_one_replicate, tasks, chunksize=max(1, replicates // (4 * jobs))))
    else:
        rows = [_one_replicate(t) for t in tasks]
    return np.array(rows)


def summarize(values, grid, distance_kind, label):
    values = np.asarray(values, dtype=float)
    R = values.shape[0]
    mean = values.mean(axis=0)
    se = values.std(axis=0, ddof=1) / math.sqrt(R) if R > 1 else np.zeros_like(mean)
    return [PcfEstimate(float(s), float(m), float(e), R, distance_kind, label)
            for s, m, e in zip(grid, mean, se)]


def pcf_curve(spec, grid, replicates, distance_kind="geodesic", rng=0, jobs=1):
    """Monte Carlo estimate of E[G_{s,N}] on every s of ``grid``.

    Each replicate draws one configuration, sorts its scaled pair distances
    once and reads off every s by binary search.
    """
    if replicates < 2:
        raise DomainError("need at least two replicates for a standard error")
    grid = SGrid(tuple(grid))
    vals = replicate_values(spec, grid.values, replicates, distance_kind, rng, jobs)
    return summarize(vals, grid.values, distance_kind, spec.label)


def pcf_from_point_sets(point_sets, grid, distance_kind="geodesic", d=None, label="points"):
    grid = SGrid(tuple(grid))
    rows = []
    for pts in point_sets:
        sd = scaled_pair_distances(pts, d, distance_kind)
        rows.append(g_from_sorted(sd, len(pts), grid.values))
    return summarize(np.array(rows), grid.values, distance_kind, label)


@dataclass(frozen=True)
class Comparison:
    s: float
    mean: float
    stderr: float
    oracle: float
    z: float
    passed: bool


def compare_to_oracle(estimates, oracle, z_max=4.0):
    """z-scores (mean - oracle) / stderr with pass flag |z| <= z_max."""
    s_est = np.array([e.s for e in estimates])
    s_orc = np.asarray(oracle.s_values, dtype=float)
    if len(s_est) != len(s_orc) or not np.allclose(s_est, s_orc, rtol=1e-12, atol=1e-12):
        raise DomainError("estimate and oracle grids differ")
    rows = []
    for e, ref in zip(estimates, oracle.values):
        diff = e.mean - ref
        if e.stderr > 0:
            z = diff / e.stderr
        elif diff == 0:
            z = 0.0
        else:
            z = math.copysign(math.inf, diff)
        rows.append(Comparison(e.s, e.mean, e.stderr, float(ref), z, abs(z) <= z_max))
    return rows


# ------------------------------------------------------------------ CSV

EST_COLUMNS = ["s", "mean", "stderr", "replicates", "ensemble", "distance"]


def write_estimates_csv(fh, estimates):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(EST_COLUMNS)
    for e in sorted(estimates, key=lambda e: e.s):
        w.writerow([repr(e.s), repr(e.mean), repr(e.stderr), e.replicates,
                    e.ensemble, e.distance_kind])


def read_estimates_csv(fh):
    rows = list(csv.DictReader(fh))
    if not rows:
        raise DomainError("no estimates in file")
    return [PcfEstimate(float(r["s"]), float(r["mean"]), float(r["stderr"]),
                        int(r["replicates"]), r["distance"], r["ensemble"])
            for r in rows]


def write_comparison_csv(fh, rows):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["s", "mean", "stderr", "oracle", "z", "pass"])
    for c in rows:
        w.writerow([repr(c.s), repr(c.mean), repr(c.stderr), repr(c.oracle),
                    repr(c.z), int(c.passed)])
