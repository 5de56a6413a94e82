import json
import math

import numpy as np
import pytest

import oracles
from ballcontract.norms import (NormBody, bounding_box, classify_generating, from_descriptor,
                                gauge, mc_body_volume, omega, parse_norm, support,
                                unit_ball_volume)


def test_gauge_closed_forms(l1_2d, linf_2d):
    assert gauge(l1_2d, [3.0, -4.0]) == pytest.approx(7)
    assert gauge(linf_2d, [3.0, -4.0]) == pytest.approx(4)


def test_cross_polytope_vertex_gauge_matches_l1():
    K = NormBody.polytope_v([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert gauge(K, [0.5, 0.5]) == pytest.approx(1.0, abs=1e-9)
    x = np.random.default_rng(0).normal(size=(200, 2))
    assert np.allclose(gauge(K, x), np.abs(x).sum(axis=1), atol=1e-9)


def test_support_closed_forms(euclid_2d, l1_2d, linf_2d):
    u = [3.0, 4.0]
    assert support(euclid_2d, u) == pytest.approx(5)
    assert support(l1_2d, u) == pytest.approx(4)
    assert support(linf_2d, u) == pytest.approx(7)


def test_h_and_v_representations_agree():
    hexagon = np.array([[math.cos(t), math.sin(t)] for t in np.arange(6) * np.pi / 3])
    Kv = NormBody.polytope_v(hexagon)
    # facet normals of the regular hexagon with unit circumradius
    normals = np.array([[math.cos(t), math.sin(t)] for t in np.arange(6) * np.pi / 3 + np.pi / 6])
    Kh = NormBody.polytope_h(normals / math.cos(np.pi / 6))
    x = np.random.default_rng(1).normal(size=(500, 2))
    assert np.allclose(gauge(Kv, x), gauge(Kh, x), atol=1e-9)
    assert np.allclose(support(Kv, x), support(Kh, x), atol=1e-9)


@pytest.mark.parametrize("K, expected", [
    (NormBody.lp(2, math.inf), 4.0),
    (NormBody.lp(3, 1.0), 8 / 6),
    (NormBody.euclidean(2), math.pi),
    (NormBody.euclidean(5), oracles.ball_volume(5)),
])
def test_exact_unit_volumes(K, expected):
    v = unit_ball_volume(K)
    assert v.is_exact
    assert v.value == pytest.approx(expected, rel=1e-12)


def test_lp_unit_volume_is_monte_carlo_and_brackets_exact_formula():
    K = NormBody.lp(2, 3.0)
    v = unit_ball_volume(K)
    assert v.method == "monte-carlo"
    exact = 4 * math.gamma(1 + 1 / 3) ** 2 / math.gamma(1 + 2 / 3)
    assert v.lo <= exact <= v.hi


@pytest.mark.parametrize("K", [NormBody.lp(2, 1.0), NormBody.lp(3, math.inf), NormBody.euclidean(3)])
def test_exact_volume_inside_mc_interval(K):
    mc = mc_body_volume(K, 200_000, seed=5)
    assert mc.lo <= K.unit_volume.value <= mc.hi


def test_omega_large_dimension_does_not_overflow():
    assert omega(200) > 0
    assert omega(2) == pytest.approx(math.pi)
    assert omega(3) == pytest.approx(4 * math.pi / 3)


def test_generating_rule_table():
    assert classify_generating(NormBody.lp(2, 3.0)) == "yes"
    assert classify_generating(NormBody.euclidean(5)) == "yes"
    assert classify_generating(NormBody.lp(3, math.inf)) == "yes"
    assert classify_generating(NormBody.lp(3, 3.0)) == "unknown"
    # octahedron: 6 vertices, 8 facets admit no polygon + segment decomposition
    assert classify_generating(NormBody.lp(3, 1.0)) == "no"


def test_generating_respects_declared_blocks():
    # hexagonal prism: hexagon in (x, y) plus a segment along z
    hexagon = [[math.cos(t), math.sin(t), 0.0] for t in np.arange(6) * np.pi / 3 + 0.2]
    normals = [[math.cos(t), math.sin(t), 0.0] for t in np.arange(6) * np.pi / 3 + 0.2 + np.pi / 6]
    normals = np.array(normals) / math.cos(np.pi / 6)
    K = NormBody.polytope_h(np.vstack([normals, [[0, 0, 1], [0, 0, -1]]]), blocks=[[0, 1], [2]])
    assert classify_generating(K) == "yes"
    unblocked = NormBody.polytope_h(K.normals)
    assert classify_generating(unblocked) == "unknown"
    assert len(hexagon) == 6


def test_generating_is_invariant_under_row_permutation():
    K = NormBody.lp(3, 1.0)
    rows = K.facets
    perm = NormBody.polytope_h(rows[np.random.default_rng(2).permutation(len(rows))])
    assert classify_generating(perm) == classify_generating(NormBody.polytope_h(rows))


def test_bounding_boxes(euclid_2d, l1_2d, linf_2d):
    lo, hi = bounding_box(euclid_2d, [[0, 0]], 1)
    assert np.allclose(lo, [-1, -1]) and np.allclose(hi, [1, 1])
    lo, hi = bounding_box(l1_2d, [[0, 0], [2, 0]], 1)
    assert np.allclose(lo, [-1, -1]) and np.allclose(hi, [3, 1])
    lo, hi = bounding_box(linf_2d, [[0, 0]], 2)
    assert np.allclose(lo, [-2, -2]) and np.allclose(hi, [2, 2])


def test_invalid_bodies_are_rejected():
    with pytest.raises(ValueError):
        NormBody.polytope_v([[1, 0], [0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        NormBody.polytope_h([[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        NormBody.polytope_h([[1, 0], [-1, 0]])  # unbounded strip
    with pytest.raises(ValueError):
        NormBody.lp(2, 0.5)


def test_parse_norm_shorthands(tmp_path):
    assert parse_norm("euclid", 3).is_euclidean
    assert parse_norm("lp:3", 2).p == 3.0
    assert parse_norm("linf", 2).p == math.inf
    f = tmp_path / "square.json"
    f.write_text(json.dumps({"vertices": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}))
    K = parse_norm(f"poly-v:{f}", 2)
    assert gauge(K, [3.0, -4.0]) == pytest.approx(4)
    with pytest.raises(ValueError):
        parse_norm(f"poly-v:{f}", 3)
    with pytest.raises(ValueError):
        parse_norm("l7", 2)


def test_descriptor_round_trip():
    for K in (NormBody.euclidean(2), NormBody.lp(3, 2.5),
              NormBody.polytope_h([[1, 0], [0, 1], [1, 1]], name="hex")):
        K2 = from_descriptor(json.loads(json.dumps(K.descriptor())), K.dim)
        x = np.random.default_rng(3).normal(size=(50, K.dim))
        assert np.array_equal(gauge(K, x), gauge(K2, x))
