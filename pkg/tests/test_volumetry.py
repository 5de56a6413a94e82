import math

import numpy as np
import pytest

import oracles
from ballcontract.ball_bodies import molecule, polyhedron, r_hull
from ballcontract.estimates import clopper_pearson
from ballcontract.norms import NormBody, omega, parse_norm
from ballcontract.volumetry import (exact_area_2d, grid_bounds, mc_volume, mean_width_hull,
                                    quermass_kubota)

LENS_UNION = oracles.two_disk_union(1.0, 1.0)
LENS = oracles.lens_area(1.0, 1.0)


def test_lens_oracle_values_frozen():
    assert LENS_UNION == pytest.approx(5.05481, abs=1e-5)
    assert LENS == pytest.approx(1.22837, abs=1e-5)


def test_mc_single_disk(euclid_2d):
    est = mc_volume(molecule([[0, 0]], 1, euclid_2d), 1_000_000, seed=1)
    assert est.lo <= math.pi <= est.hi
    assert est.method == "monte-carlo" and est.samples == 1_000_000


def test_mc_two_disks(euclid_2d):
    X = [[0, 0], [1, 0]]
    u = mc_volume(molecule(X, 1, euclid_2d), 400_000, seed=2)
    i = mc_volume(polyhedron(X, 1, euclid_2d), 400_000, seed=3)
    assert u.lo <= LENS_UNION <= u.hi
    assert i.lo <= LENS <= i.hi


def test_mc_is_independent_of_jobs(euclid_2d):
    R = molecule([[0, 0], [1, 0]], 1, euclid_2d)
    a = mc_volume(R, 300_000, seed=9, jobs=1)
    b = mc_volume(R, 300_000, seed=9, jobs=4)
    assert a == b


def test_mc_empty_and_unbounded(linf_2d):
    est = mc_volume(polyhedron([[0, 0], [3, 0]], 1, linf_2d), 100, seed=0)
    assert est.value == 0 and est.is_exact and est.note == "empty"
    with pytest.raises(ValueError):
        mc_volume(r_hull([[0, 0], [3, 0]], 1, linf_2d), 100, seed=0)


def test_mc_hull_uncertainty_is_reported():
    K = parse_norm("lp:3", 2)
    est = mc_volume(r_hull([[0, 0], [0.8, 0.3]], 1.0, K), 50_000, seed=4)
    assert est.lo <= est.value <= est.hi
    assert est.bias >= 0


def test_exact_area_examples(linf_2d, l1_2d, grid3):
    assert exact_area_2d(molecule([[0, 0], [1, 0]], 1, linf_2d)).value == pytest.approx(6)
    assert exact_area_2d(polyhedron(grid3, 3, linf_2d)).value == pytest.approx(16)
    assert exact_area_2d(molecule([[0, 0]], 2, l1_2d)).value == pytest.approx(8)
    assert exact_area_2d(polyhedron([[0, 0], [3, 0]], 1, linf_2d)).value == 0


def test_exact_area_rejects_curved_norms(euclid_2d):
    with pytest.raises(ValueError):
        exact_area_2d(molecule([[0, 0]], 1, euclid_2d))
    with pytest.raises(ValueError):
        exact_area_2d(molecule([[0, 0, 0]], 1, NormBody.lp(3, 1.0)))


@pytest.mark.parametrize("shape, norm", [(oracles.square, "linf"), (oracles.diamond, "l1")])
def test_exact_area_matches_shapely(shape, norm):
    K = parse_norm(norm, 2)
    rng = np.random.default_rng(21)
    for _ in range(10):
        X = rng.uniform(-2, 2, size=(int(rng.integers(2, 7)), 2))
        r = float(rng.uniform(0.3, 2.5))
        balls = [shape(x, r) for x in X]
        assert exact_area_2d(molecule(X, r, K)).value == pytest.approx(
            oracles.shapely_union_area(balls), rel=1e-9, abs=1e-12)
        assert exact_area_2d(polyhedron(X, r, K)).value == pytest.approx(
            oracles.shapely_intersection_area(balls), rel=1e-9, abs=1e-12)


def test_grid_bounds_examples(linf_2d, euclid_2d):
    lo, hi = grid_bounds(molecule([[0, 0]], 1, linf_2d), 64)
    assert lo <= 4 <= hi and hi - lo < 0.3
    lo, hi = grid_bounds(molecule([[0, 0]], 1, euclid_2d), 512)
    assert lo <= math.pi <= hi
    assert grid_bounds(polyhedron([[0, 0], [3, 0]], 1, linf_2d), 16) == (0.0, 0.0)
    with pytest.raises(ValueError):
        grid_bounds(molecule([[0, 0]], 1, linf_2d), 1)


def test_grid_sandwiches_exact_area(l1_2d):
    rng = np.random.default_rng(2)
    X = rng.uniform(-1, 1, size=(4, 2))
    for R in (molecule(X, 0.8, l1_2d), polyhedron(X, 2.0, l1_2d), r_hull(X, 2.0, l1_2d)):
        lo, hi = grid_bounds(R, 200)
        assert lo <= exact_area_2d(R).value <= hi


def test_clopper_pearson_edges():
    lo, hi = clopper_pearson(0, 100, 0.99)
    assert lo == 0 and 0 < hi < 0.06
    lo, hi = clopper_pearson(100, 100, 0.99)
    assert hi == 1 and lo > 0.94


@pytest.mark.parametrize("d", [2, 3])
def test_kubota_single_ball_closed_forms(d):
    for k in range(d + 1):
        for rho in (1.0, 1.7):
            est = quermass_kubota(molecule(np.zeros((1, d)), rho, NormBody.euclidean(d)), k,
                                  direction_samples=32, vol_samples=200_000, seed=k)
            expected = rho ** (d - k) * omega(d)
            assert est.value == pytest.approx(expected, rel=0.01)
            assert est.lo <= expected <= est.hi or est.lo == est.hi


def test_kubota_endpoints():
    E = NormBody.euclidean(2)
    R = molecule([[0, 0], [1.5, 0.2]], 1.0, E)
    assert quermass_kubota(R, 2).value == pytest.approx(math.pi)
    w0 = quermass_kubota(R, 0, vol_samples=100_000, seed=3)
    v = mc_volume(R, 100_000, seed=4)
    assert max(w0.lo, v.lo) <= min(w0.hi, v.hi)


def test_kubota_two_disks_matches_hull():
    """Projections of two overlapping disks are intervals, so W_1 is that of the convex hull.

    The hull of unit disks at distance 1 has perimeter 2 pi + 2, and W_1 is half of it.
    """
    E = NormBody.euclidean(2)
    est = quermass_kubota(molecule([[0, 0], [1, 0]], 1.0, E), 1, direction_samples=4000, seed=5)
    assert est.lo <= math.pi + 1 <= est.hi


def test_mean_width_hull_examples():
    assert mean_width_hull([[0, 0]], 1.3, 64, seed=0).value == pytest.approx(1.3 * math.pi)
    est = mean_width_hull([[0, 0], [2, 0]], 0.0, 20_000, seed=1)
    assert est.lo <= 2.0 <= est.hi
    a = mean_width_hull([[0, 0], [0, 0]], 1.0, 128, seed=2)
    b = mean_width_hull([[0, 0]], 1.0, 128, seed=2)
    assert a.value == pytest.approx(b.value)


def test_quermass_rejects_other_norms(linf_2d):
    with pytest.raises(ValueError):
        quermass_kubota(molecule([[0, 0]], 1, linf_2d), 1)
    with pytest.raises(ValueError):
        quermass_kubota(polyhedron([[0, 0]], 1, NormBody.euclidean(2)), 1)
