import numpy as np
import pytest

from ballcontract.ball_bodies import BallRegion, contains, is_empty, molecule, polyhedron, r_hull
from ballcontract.norms import NormBody, gauge, parse_norm


def test_molecule_membership(euclid_2d):
    M = molecule([[0, 0], [1, 0]], 1, euclid_2d)
    assert contains(M, [1.9, 0])
    assert not contains(M, [0, 1.05])


def test_polyhedron_of_grid_is_square(linf_2d, grid3):
    B = polyhedron(grid3, 3, linf_2d)
    assert contains(B, [3, 3])
    assert not contains(B, [3.01, 0])
    assert np.allclose(np.sort(B.polygon, axis=0)[[0, -1]], [[-1, -1], [3, 3]])


@pytest.mark.parametrize("norm", ["l1", "euclid", "lp:3"])
def test_hull_of_a_point(norm):
    K = parse_norm(norm, 2)
    H = r_hull([[0.5, 0.5]], 1.0, K)
    assert contains(H, [0.5, 0.5])
    assert not contains(H, [0.5 + 2.1, 0.5])


def test_emptiness_threshold(linf_2d):
    X = [[0, 0], [2, 0]]
    assert is_empty(polyhedron(X, 0.9, linf_2d))
    B = polyhedron(X, 1.0, linf_2d)
    assert not is_empty(B)
    assert contains(B, [1, 0])
    assert not is_empty(molecule(X, 0.1, linf_2d))


def test_unbounded_hull(linf_2d):
    H = r_hull([[0, 0], [2, 0]], 0.5, linf_2d)
    assert H.unbounded
    assert contains(H, [100.0, 100.0])


def test_region_validation(linf_2d):
    with pytest.raises(ValueError):
        BallRegion("blob", [[0, 0]], 1, linf_2d)
    with pytest.raises(ValueError):
        molecule([[0, 0]], 0, linf_2d)
    with pytest.raises(ValueError):
        molecule([[0, 0, 0]], 1, linf_2d)


@pytest.mark.parametrize("norm", ["l1", "linf", "euclid", "lp:3"])
def test_hull_sandwich(norm):
    """conv(X) inside the r-ball hull inside the circumball."""
    K = parse_norm(norm, 2)
    rng = np.random.default_rng(3)
    X = rng.uniform(-0.5, 0.5, size=(5, 2))
    H = r_hull(X, 1.5, K)
    w = rng.dirichlet(np.ones(5), size=300)
    assert np.all(contains(H, w @ X))
    y = rng.uniform(-3, 3, size=(3000, 2))
    inside = contains(H, y)
    cb = H.circumball
    assert np.all(gauge(K, y[inside] - cb.center) <= cb.radius + 1e-6)


@pytest.mark.parametrize("norm", ["l1", "linf", "euclid"])
def test_polyhedron_is_r_ball_convex(norm):
    """Every point of X^r lies in the polyhedron of sampled points of X^r."""
    K = parse_norm(norm, 2)
    rng = np.random.default_rng(5)
    X = rng.uniform(-0.3, 0.3, size=(4, 2))
    r = 1.0
    B = polyhedron(X, r, K)
    y = rng.uniform(-1.5, 1.5, size=(4000, 2))
    pts = y[contains(B, y)]
    # any finite subset Y of B has B inside polyhedron(Y) when ... the hull of B is B
    H = r_hull(pts[:60], r, K)
    assert np.all(contains(H, pts[:60]))
    assert np.all(contains(polyhedron(X, r, K), pts))


def test_reach_is_lipschitz(l1_2d):
    R = molecule([[0, 0], [1, 2]], 1, l1_2d)
    rng = np.random.default_rng(0)
    a, b = rng.normal(size=(500, 2)), rng.normal(size=(500, 2))
    assert np.all(np.abs(R.reach(a) - R.reach(b)) <= gauge(l1_2d, a - b) + 1e-12)


def test_euclidean_projection_of_molecule_is_molecule_of_projection():
    rng = np.random.default_rng(9)
    c = rng.normal(size=(6, 3))
    M3 = molecule(c, 0.7, NormBody.euclidean(3))
    M2 = molecule(c[:, :2], 0.7, NormBody.euclidean(2))
    y = rng.uniform(-3, 3, size=(2000, 2))
    # y is in the projection iff some point (y, z) lies in M3; the best z is a center's z
    zs = c[:, 2]
    lifted = np.stack([np.column_stack([y, np.full(len(y), z)]) for z in zs])
    in_proj = np.any([contains(M3, L) for L in lifted], axis=0)
    assert np.array_equal(in_proj, contains(M2, y))


def test_hull_polygon_of_single_point_is_that_point():
    from ballcontract.instances import random_hexagon
    K = random_hexagon(11)
    X = np.array([[-0.2, 0.13]])
    hull = r_hull(X, 0.1, K).polygon
    assert len(hull) >= 1
    assert np.allclose(hull, X[0], atol=1e-9)


def test_lattice_packing_certifies_exactly():
    from ballcontract.instances import gen_packed, random_hexagon
    from ballcontract.configurations import min_separation
    for s in range(20):
        K = random_hexagon(s)
        assert min_separation(gen_packed(2, 16, 1.0, K, "lattice"), K) >= 1.0
