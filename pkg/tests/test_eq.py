import json
import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist
from hypothesis import given, settings
from hypothesis import strategies as st

from spherepcf.eq import (EqPartition, RegionId, build_eq_partition, collar_plan, locate,
                          region_area, region_diameter, region_perimeter,
                          rectangle_diameter, sample_in_region, total_perimeter)
from spherepcf.errors import DomainError
from spherepcf.geometry import distance, from_spherical, uniform_sphere


def test_n1_whole_sphere():
    p = build_eq_partition(1)
    assert p.n_collars == 0 and p.regions() == [RegionId(0, 0)]
    assert region_area(p, RegionId(0)) == 1
    assert region_diameter(p, RegionId(0)) == math.pi


def test_n2_hemispheres():
    p = build_eq_partition(2)
    assert p.cap_colatitude == pytest.approx(math.pi / 2)
    assert p.n_collars == 0 and len(p.regions()) == 2
    assert region_perimeter(p, RegionId(0)) == pytest.approx(2 * math.pi)
    assert total_perimeter(p) == pytest.approx(4 * math.pi)
    assert region_diameter(p, RegionId(1)) == pytest.approx(math.pi)


def test_n3_builds():
    # round(n_I) is 0 here; at least one collar is needed
    p = build_eq_partition(3)
    assert p.n_collars == 1 and p.region_counts == (1,)
    # a single-region collar has no meridian edges
    top, bot = p.collar_colatitudes
    assert region_perimeter(p, RegionId(1, 0)) == pytest.approx(2 * math.pi * (math.sin(top) + math.sin(bot)))


def test_n200():
    p = build_eq_partition(200)
    assert sum(p.region_counts) == 198
    np.testing.assert_allclose(p.region_areas(), 1 / 200, atol=1e-12)


def test_bad_n():
    for n in (0, -3, 2.5):
        with pytest.raises(DomainError):
            build_eq_partition(n)


@settings(max_examples=120, deadline=None)
@given(st.integers(2, 500))
def test_partition_invariants(N):
    p = build_eq_partition(N)
    th = np.array(p.collar_colatitudes)
    assert np.all(np.diff(th) > 0) or p.n_collars == 0
    assert 2 + sum(p.region_counts) == N
    assert np.max(np.abs(p.region_areas() - 1 / N)) <= 1e-12
    assert p.region_areas().sum() == pytest.approx(1, abs=1e-10)
    if p.n_collars:
        fit = np.array(p.fitting_colatitudes())
        assert np.max(np.abs(np.cos(th) - np.cos(fit))) <= 1 / N + 1e-15
        assert th[0] == p.cap_colatitude
        assert th[-1] == pytest.approx(math.pi - p.cap_colatitude, abs=1e-14)


def test_collar_plan_matches_round():
    plan = collar_plan(100)
    assert plan.n_collars == math.floor(plan.ideal_collars + 0.5)
    assert sum(plan.ideal_counts) == pytest.approx(98)


def test_region_area_examples():
    p = build_eq_partition(10)
    for r in p.regions():
        assert region_area(p, r) == pytest.approx(0.1, abs=1e-12)
    for N in (7, 100, 1234):
        q = build_eq_partition(N)
        assert region_area(q, RegionId(0)) == pytest.approx(1 / N, abs=1e-15)
        assert math.sin(q.cap_colatitude / 2) ** 2 == pytest.approx(1 / N)


def test_region_id_errors():
    p = build_eq_partition(10)
    with pytest.raises(DomainError):
        region_area(p, RegionId(99, 0))
    with pytest.raises(DomainError):
        region_area(p, RegionId(1, 50))
    with pytest.raises(DomainError):
        region_area(p, RegionId(0, 1))


def test_perimeter_examples():
    p = build_eq_partition(100)
    assert region_perimeter(p, RegionId(0)) == pytest.approx(2 * math.pi * math.sin(2 * math.asin(0.1)))
    assert region_perimeter(p, RegionId(0)) == pytest.approx(1.2504, abs=1e-3)
    q = build_eq_partition(400)
    per = region_perimeter(q, RegionId(q.n_collars // 2, 0))
    # a square of side sqrt(4 pi / N) has perimeter 8 sqrt(pi) / sqrt(N)
    assert per == pytest.approx(8 * math.sqrt(math.pi) / 20, rel=0.1)


def test_total_perimeter_trend():
    ratios = [total_perimeter(build_eq_partition(N)) / (8 * math.sqrt(math.pi * N))
              for N in (10**3, 10**4, 10**5)]
    assert abs(ratios[1] - 1) <= 0.02 and abs(ratios[2] - 1) <= 0.02
    assert abs(ratios[2] - 1) < abs(ratios[0] - 1)


def test_total_perimeter_is_sum():
    p = build_eq_partition(57)
    assert total_perimeter(p) == pytest.approx(sum(region_perimeter(p, r) for r in p.regions()))


def test_diameter_bounds():
    for N in (100, 1000, 10**4):
        p = build_eq_partition(N)
        dmax = max(region_diameter(p, r) for r in p.regions())
        assert dmax <= 12.8 / math.sqrt(N)
    p = build_eq_partition(50)
    assert region_diameter(p, RegionId(0)) == pytest.approx(4 * math.asin(1 / math.sqrt(50)))


@pytest.mark.parametrize("N", [3, 5, 10, 40])
def test_diameter_against_brute_force(N):
    p = build_eq_partition(N)
    rng = np.random.default_rng(N)
    for r in p.regions():
        pts = sample_in_region(p, r, rng, 1500)
        top, bot, low, width = (float(a[p.region_index(r)]) for a in p._table)
        # add boundary points, where the extremes live
        t = np.linspace(top, bot, 25)
        f = low + np.linspace(0, width, 25)
        T, F = np.meshgrid(t, f)
        pts = np.vstack([pts, from_spherical(T.ravel(), F.ravel())])
        brute = 2 * math.asin(min(1.0, pdist(pts).max() / 2))
        diam = region_diameter(p, r)
        assert brute <= diam + 1e-12
        assert brute >= diam - 0.02


def test_rectangle_diameter_wide():
    # a band that straddles the equator with width >= pi has diameter pi
    assert rectangle_diameter(1.0, 2.0, 4.0) == pytest.approx(math.pi)


def test_locate_examples(rng):
    p = build_eq_partition(50)
    assert locate(p, [0, 0, 1]) == RegionId(0, 0)
    assert locate(p, [0, 0, -1]) == RegionId(p.n_collars + 1, 0)
    th2 = p.collar_colatitudes[1]
    x = from_spherical(th2, 0.1)
    assert locate(p, x).collar_index == 2
    idx = rng.integers(0, 50, 10**5)
    pts = p.sample_regions(idx, rng)
    assert np.array_equal(p.locate(pts), idx)


def test_sample_in_region_uniform(rng):
    p = build_eq_partition(100)
    r = RegionId(3, 1)
    pts = sample_in_region(p, r, rng, 10**6)
    i = p.region_index(r)
    top, bot = p._table[0][i], p._table[1][i]
    z = pts[:, 2]
    mid = (math.cos(top) + math.cos(bot)) / 2
    assert abs(z.mean() - mid) <= 4 * z.std() / 1000
    assert all(locate(p, x) == r for x in pts[:100])
    a = sample_in_region(p, r, np.random.default_rng(9), 5)
    b = sample_in_region(p, r, np.random.default_rng(9), 5)
    assert np.array_equal(a, b)
    assert sample_in_region(p, r, rng).shape == (3,)


def test_locate_covers_sphere(rng):
    p = build_eq_partition(123)
    counts = np.bincount(p.locate(uniform_sphere(rng, 123_000)), minlength=123)
    assert counts.min() > 800 and counts.max() < 1200


def test_json_roundtrip():
    p = build_eq_partition(200)
    text = p.to_json()
    q = EqPartition.from_json(text)
    assert q == p
    assert q.to_json() == text
    assert set(json.loads(text)) == {"n_regions", "cap_colatitude", "n_collars",
                                     "collar_colatitudes", "region_counts",
                                     "collar_phi_offsets"}
    d = json.loads(text)
    d["region_counts"][0] += 1
    with pytest.raises(DomainError):
        EqPartition.from_dict(d)


def test_region_id_roundtrip():
    p = build_eq_partition(77)
    for i, r in enumerate(p.regions()):
        assert p.region_index(r) == i and p.region_id(i) == r
