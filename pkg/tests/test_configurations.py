import math

import numpy as np
import pytest

import oracles
from ballcontract.configurations import (PointConfiguration, certify_uniform_contraction,
                                         circumradius, diameter, min_separation,
                                         smallest_enclosing_ball, volumetric_radius)
from ballcontract.norms import NormBody, gauge


def test_diameters(euclid_2d, l1_2d, linf_2d):
    assert diameter([[0, 0]], euclid_2d) == 0
    assert diameter([[0, 0], [2, 0], [0, 2]], linf_2d) == pytest.approx(2)
    assert diameter([[0, 0], [1, 1]], l1_2d) == pytest.approx(2)


def test_min_separation(linf_2d, grid3):
    assert min_separation(grid3, linf_2d) == pytest.approx(1)


def test_circumradius_examples(euclid_2d, linf_2d, grid3):
    cb = circumradius([[0, 0], [2, 0]], linf_2d)
    assert cb.radius == pytest.approx(1)
    assert gauge(linf_2d, cb.center - [0, 0]) <= 1 + 1e-9
    tri = [[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]]
    assert circumradius(tri, euclid_2d).radius == pytest.approx(1 / math.sqrt(3), abs=1e-9)
    cb = circumradius(grid3, linf_2d)
    assert cb.radius == pytest.approx(1)
    assert np.allclose(cb.center, [1, 1])


def test_singleton_circumradius(linf_2d):
    cb = circumradius([[0.3, -2.0]], linf_2d)
    assert cb.radius == 0
    assert np.allclose(cb.center, [0.3, -2.0])


@pytest.mark.parametrize("norm", ["l1", "linf", "lp:3", "euclid"])
def test_circumradius_matches_brute_force(norm):
    from ballcontract.norms import parse_norm
    K = parse_norm(norm, 2)
    rng = np.random.default_rng(11)
    for _ in range(3):
        pts = rng.uniform(-1, 1, size=(6, 2))
        expected = oracles.brute_circumradius_2d(pts, lambda v: gauge(K, v))
        cb = circumradius(pts, K)
        assert cb.radius == pytest.approx(expected, abs=1e-4)
        assert cb.radius - cb.gap <= expected + 1e-6
        # the returned center witnesses the radius
        assert np.max(gauge(K, pts - cb.center)) <= cb.radius * (1 + 1e-7) + 1e-12


def test_linf_circumradius_is_half_span(linf_2d):
    pts = np.random.default_rng(4).normal(size=(20, 2))
    assert circumradius(pts, linf_2d).radius == pytest.approx(oracles.linf_circumradius(pts), abs=1e-9)


def test_welzl_matches_euclidean_circumradius():
    pts = np.random.default_rng(8).normal(size=(40, 3))
    center, radius = smallest_enclosing_ball(pts)
    assert np.max(np.linalg.norm(pts - center, axis=1)) <= radius + 1e-9
    assert radius == pytest.approx(circumradius(pts, NormBody.euclidean(3)).radius, abs=1e-9)


def test_volumetric_radius(linf_2d):
    assert volumetric_radius(4.0, linf_2d) == pytest.approx(1)
    assert volumetric_radius(16.0, linf_2d) == pytest.approx(2)
    assert volumetric_radius(9 * 0.25 * 4, linf_2d) == pytest.approx(1.5)


def test_certificate_pass(linf_2d):
    P = [[0, 0], [2, 0], [0, 2], [2, 2]]
    cert = certify_uniform_contraction(P, [[0, 0]] * 4, 2.0, linf_2d)
    assert cert.passed and cert.violation is None


def test_certificate_q_side_violation(linf_2d):
    P = [[0, 0], [2, 0], [0, 2], [2, 2]]
    cert = certify_uniform_contraction(P, [[0, 0], [3, 0], [0, 0], [0, 0]], 2.0, linf_2d)
    assert not cert.passed
    assert cert.violation == ("Q", (1, 2), pytest.approx(1.0))


def test_certificate_p_side_violation(linf_2d):
    cert = certify_uniform_contraction([[0, 0], [1, 0]], [[0, 0], [0, 0]], 1.5, linf_2d)
    assert cert.violation[:2] == ("P", (1, 2))
    assert "P-side pair (1, 2)" in cert.describe()


def test_certificate_rejects_bad_input(linf_2d):
    with pytest.raises(ValueError):
        certify_uniform_contraction([[0, 0], [1, 0]], [[0, 0]], 1.0, linf_2d)
    with pytest.raises(ValueError):
        certify_uniform_contraction([[0, 0], [1, 0]], [[0, 0], [0, 0]], 0.0, linf_2d)


def test_point_configuration_transforms(linf_2d):
    X = PointConfiguration([[0, 0], [2, 1]], "X")
    assert diameter(X.translate([5, 5]), linf_2d) == pytest.approx(2)
    assert diameter(X.scale(3), linf_2d) == pytest.approx(6)
    with pytest.raises(ValueError):
        PointConfiguration(np.zeros((0, 2)))
