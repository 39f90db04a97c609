"""Recursive zonal equal-area partition EQ(2, N) of the sphere S^2.

The partition has two polar caps of colatitude ``theta_c`` and ``n`` collars
between them. Collar ``i`` spans colatitudes [theta_i, theta_{i+1}] and is
cut into ``m_i`` congruent regions by meridians. Region ids are
``RegionId(collar_index, slot)`` with collar 0 the north cap and collar
n + 1 the south cap.
"""

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .geometry import from_spherical, spherical_coords

TWO_PI = 2 * math.pi
AREA_TOL = 1e-12


class RegionId(NamedTuple):
    collar_index: int
    slot: int = 0


def _round(x):
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class CollarPlan:
    """Intermediate quantities of the construction, kept for diagnostics."""

    cap_colatitude: float
    ideal_collar_angle: float
    ideal_collars: float
    n_collars: int
    fitting_angle: float
    fitting_colatitudes: tuple
    ideal_counts: tuple
    region_counts: tuple


def collar_plan(N):
    """Run the collar-count and region-count steps of the EQ(2, N) algorithm."""
    if N < 1 or int(N) != N:
        raise DomainError(f"EQ(2, N) needs a positive integer N, got {N}")
    N = int(N)
    if N == 1:
        return CollarPlan(math.pi, math.sqrt(4 * math.pi), 0.0, 0, 0.0, (), (), ())
    theta_c = 2 * math.asin(1 / math.sqrt(N))
    delta_i = math.sqrt(4 * math.pi / N)
    n_ideal = (math.pi - 2 * theta_c) / delta_i
    n = _round(n_ideal)
    if N > 2:
        # round(n_I) is 0 for N = 3, which would leave a region unplaced
        n = max(1, n)
    if n == 0:
        return CollarPlan(theta_c, delta_i, n_ideal, 0, 0.0, (theta_c,), (), ())
    delta_f = (math.pi - 2 * theta_c) / n
    fitting = [theta_c + i * delta_f for i in range(n + 1)]
    fitting[-1] = math.pi - theta_c
    ideal = [(math.cos(fitting[i]) - math.cos(fitting[i + 1])) * N / 2
             for i in range(n)]
    counts = []
    carry = 0.0
    for y in ideal:
        m = _round(y + carry)
        carry += y - m
        counts.append(m)
    return CollarPlan(theta_c, delta_i, n_ideal, n, delta_f, tuple(fitting),
                      tuple(ideal), tuple(counts))


@dataclass(frozen=True)
class EqPartition:
    n_regions: int
    cap_colatitude: float
    n_collars: int
    collar_colatitudes: tuple
    region_counts: tuple
    collar_phi_offsets: tuple

    def __post_init__(self):
        object.__setattr__(self, "collar_colatitudes",
                           tuple(float(t) for t in self.collar_colatitudes))
        object.__setattr__(self, "region_counts",
                           tuple(int(m) for m in self.region_counts))
        object.__setattr__(self, "collar_phi_offsets",
                           tuple(float(o) for o in self.collar_phi_offsets))

    # ------------------------------------------------------------ structure

    @property
    def N(self):
        return self.n_regions

    def validate(self):
        """Raise DomainError unless the partition invariants hold."""
        N, n = self.n_regions, self.n_collars
        if N == 1:
            if n or self.collar_colatitudes or self.region_counts:
                raise DomainError("EQ(2, 1) has no collars")
            return self
        th = self.collar_colatitudes
        if len(th) != n + 1 or len(self.region_counts) != n or len(self.collar_phi_offsets) != n:
            raise DomainError("collar arrays have inconsistent lengths")
        if (th[0] != self.cap_colatitude
                or abs(th[-1] - (math.pi - self.cap_colatitude)) > 1e-14):
            raise DomainError("outer collar colatitudes must match the caps")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise DomainError("collar colatitudes must increase strictly")
        if any(m < 1 for m in self.region_counts) or 2 + sum(self.region_counts) != N:
            raise DomainError("region counts do not add up to N")
        if np.max(np.abs(self.region_areas() - 1 / N)) > AREA_TOL:
            raise DomainError("regions are not of equal area")
        return self

    def fitting_colatitudes(self):
        return collar_plan(self.n_regions).fitting_colatitudes

    def regions(self):
        """All region ids, north cap first and south cap last."""
        if self.n_regions == 1:
            return [RegionId(0, 0)]
        ids = [RegionId(0, 0)]
        for i, m in enumerate(self.region_counts, start=1):
            ids.extend(RegionId(i, j) for j in range(m))
        ids.append(RegionId(self.n_collars + 1, 0))
        return ids

    @cached_property
    def _offsets(self):
        # flat index of slot 0 in every collar, caps included
        sizes = [1, *self.region_counts, 1] if self.n_regions > 1 else [1]
        return np.concatenate([[0], np.cumsum(sizes)])

    def region_index(self, r):
        r = RegionId(*r)
        last = self.n_collars + 1 if self.n_regions > 1 else 0
        if not 0 <= r.collar_index <= last:
            raise DomainError(f"no collar {r.collar_index} in EQ(2, {self.n_regions})")
        size = self._offsets[r.collar_index + 1] - self._offsets[r.collar_index]
        if not 0 <= r.slot < size:
            raise DomainError(f"no slot {r.slot} in collar {r.collar_index}")
        return int(self._offsets[r.collar_index] + r.slot)

    def region_id(self, index):
        band = int(np.searchsorted(self._offsets, index, side="right") - 1)
        return RegionId(band, int(index - self._offsets[band]))

    @cached_property
    def _table(self):
        """Per-region (theta_top, theta_bottom, phi_low, phi_width) arrays."""
        if self.n_regions == 1:
            return (np.array([0.0]), np.array([math.pi]), np.array([0.0]),
                    np.array([TWO_PI]))
        tops, bots, lows, widths = [0.0], [self.cap_colatitude], [0.0], [TWO_PI]
        th = self.collar_colatitudes
        for i, (m, off) in enumerate(zip(self.region_counts, self.collar_phi_offsets)):
            w = TWO_PI / m
            tops += [th[i]] * m
            bots += [th[i + 1]] * m
            lows += [off + j * w for j in range(m)]
            widths += [w] * m
        tops.append(math.pi - self.cap_colatitude)
        bots.append(math.pi)
        lows.append(0.0)
        widths.append(TWO_PI)
        return tuple(np.array(a) for a in (tops, bots, lows, widths))

    def region_areas(self):
        top, bot, _, width = self._table
        return (np.cos(top) - np.cos(bot)) / 2 * width / TWO_PI

    # ------------------------------------------------------------ queries

    def locate(self, points):
        """Flat region indices of points (array of shape (..., 3))."""
        theta, phi = spherical_coords(points)
        if self.n_regions == 1:
            return np.zeros(np.shape(theta), dtype=int)
        band = np.searchsorted(np.asarray(self.collar_colatitudes), theta, side="right")
        counts = np.array([1, *self.region_counts, 1])
        offs = np.array([0.0, *self.collar_phi_offsets, 0.0])
        m = counts[band]
        slot = np.floor(np.mod(phi - offs[band], TWO_PI) / (TWO_PI / m)).astype(int)
        slot = np.minimum(slot, m - 1)
        return self._offsets[band] + slot

    def sample_regions(self, indices, rng):
        """One exact uniform point in each listed region (flat indices)."""
        top, bot, low, width = (a[indices] for a in self._table)
        z = rng.uniform(np.cos(bot), np.cos(top))
        phi = low + width * rng.uniform(size=np.shape(indices))
        theta = np.arccos(np.clip(z, -1.0, 1.0))
        return from_spherical(theta, phi)

    def to_dict(self):
        d = asdict(self)
        for k in ("collar_colatitudes", "region_counts", "collar_phi_offsets"):
            d[k] = list(d[k])
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n_regions"]), float(d["cap_colatitude"]), int(d["n_collars"]),
                   d["collar_colatitudes"], d["region_counts"],
                   d["collar_phi_offsets"]).validate()

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def build_eq_partition(N):
    """Construct EQ(2, N) with all collar rotations set to zero."""
    plan = collar_plan(N)
    N = int(N)
    if plan.n_collars == 0:
        return EqPartition(N, plan.cap_colatitude, 0,
                           plan.fitting_colatitudes, (), ()).validate()
    cum = np.cumsum([1, *plan.region_counts])
    # cap area of colatitude theta_i is (1 + m_1 + ... + m_{i-1}) / N
    theta = [2 * math.asin(math.sqrt(c / N)) for c in cum]
    theta[0] = plan.cap_colatitude
    theta[-1] = math.pi - plan.cap_colatitude
    return EqPartition(N, plan.cap_colatitude, plan.n_collars, theta,
                       plan.region_counts, (0.0,) * plan.n_collars).validate()


def region_area(p, r):
    return float(p.region_areas()[p.region_index(r)])


def region_perimeter(p, r):
    """Boundary length of a region: latitude arcs plus meridian sides."""
    top, bot, _, width = (a[p.region_index(r)] for a in p._table)
    return _perimeter(top, bot, width)


def _perimeter(top, bot, width):
    lat = width * (np.sin(top) + np.sin(bot))
    sides = np.where(width < TWO_PI, 2 * (bot - top), 0.0)
    return lat + sides


def total_perimeter(p):
    """Sum of all region perimeters; every shared edge is counted twice."""
    top, bot, _, width = p._table
    return float(np.sum(_perimeter(top, bot, width)))


def _span_distance(ta, tb, dphi):
    c = np.cos(ta) * np.cos(tb) + np.sin(ta) * np.sin(tb) * math.cos(dphi)
    return math.acos(min(1.0, max(-1.0, c)))


def rectangle_diameter(top, bot, width):
    """Geodesic diameter of {top <= theta <= bot, 0 <= phi <= width}.

    For fixed colatitudes the distance grows with the longitude gap up to
    pi, so the gap min(width, pi) is extremal. Over the colatitudes the
    maximum sits at an endpoint pair, at a one-sided stationary point, or
    at the equator pair.
    """
    dphi = min(width, math.pi)
    c = math.cos(dphi)
    cands = {(top, top), (top, bot), (bot, bot)}
    for tb in (top, bot):
        ta = math.atan2(-math.sin(tb) * c, -math.cos(tb)) % TWO_PI
        if top <= ta <= bot:
            cands.add((ta, tb))
    if top <= math.pi / 2 <= bot:
        cands.add((math.pi / 2, math.pi / 2))
    return max(_span_distance(a, b, dphi) for a, b in cands)


def region_diameter(p, r):
    i = p.region_index(r)
    top, bot, _, width = (float(a[i]) for a in p._table)
    if width >= TWO_PI:
        # caps and whole-collar bands
        if p.n_regions == 1:
            return math.pi
        return rectangle_diameter(top, bot, TWO_PI)
    return rectangle_diameter(top, bot, width)


def locate(p, x):
    return p.region_id(int(p.locate(np.asarray(x, dtype=float))))


def sample_in_region(p, r, rng, size=None):
    """Exact uniform draw(s) from region ``r``; no rejection."""
    i = p.region_index(r)
    idx = np.full(() if size is None else size, i)
    return p.sample_regions(idx, rng)
