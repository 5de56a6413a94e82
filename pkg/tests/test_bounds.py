import math

import mpmath
import numpy as np
import pytest

from ballcontract import bounds as B
from ballcontract.norms import omega


def test_union_bounds_examples():
    assert B.union_upper(1, 1, 2, 4) == pytest.approx(9)
    assert B.union_upper(1, 1, 2, math.pi) == pytest.approx(2.25 * math.pi)
    assert B.union_upper(1, 1e-12, 2, 4) == pytest.approx(4)
    assert B.union_lower(1, 1, 2, 1, 4) == pytest.approx(4)
    assert B.union_lower(1, 1, 2, 4, 4) == pytest.approx(9)
    assert B.union_lower(1, 1, 2, 9, 4) == pytest.approx(16)


def test_intersection_bounds_examples():
    assert B.intersection_lower_bohnenblust(2, 1, 2, 4) == pytest.approx(64 / 9)
    assert B.intersection_lower_bohnenblust(0.5, 1, 2, 4) == 0
    assert B.intersection_lower_bohnenblust(2, 1e-12, 2, 4) == pytest.approx(16)
    assert B.intersection_upper(3, 1, 2, 9, 4) == pytest.approx(16)
    assert B.intersection_upper(3, 1, 2, 10_000, 4) == 0
    assert B.intersection_upper(3, 1, 2, 1, 4) == pytest.approx(36)


def test_blaschke_santalo_examples():
    assert B.blaschke_santalo_bound(4, 2, 2, 4) == pytest.approx(4)
    assert B.blaschke_santalo_bound(9 * 0.25 * 4, 3.5, 2, 4) == pytest.approx(16)
    assert B.blaschke_santalo_bound(1e-30, 2, 2, 4) == pytest.approx(16)
    with pytest.raises(ValueError):
        B.blaschke_santalo_bound(16, 2, 2, 4)


def test_quermass_bounds_examples():
    assert B.quermass_union_upper(1, 1, 2, 0) == pytest.approx(B.union_upper(1, 1, 2, math.pi))
    assert B.quermass_union_lower(1, 1, 2, 9, 0) == pytest.approx(B.union_lower(1, 1, 2, 9, math.pi))
    assert B.quermass_union_upper(1, 1, 2, 1) == pytest.approx(1.5 * math.pi)
    assert B.quermass_union_lower(1, 1, 2, 4, 1) == pytest.approx(1.5 * math.pi)
    assert B.quermass_union_upper(1, 2, 3, 1) == pytest.approx(16 * math.pi / 3)
    assert B.quermass_union_lower(1, 2, 3, 8, 1) == pytest.approx(16 * math.pi / 3)
    with pytest.raises(ValueError):
        B.quermass_union_upper(1, 1, 2, 2)


def test_schramm_F_examples():
    mpmath.mp.dps = 40
    expected = float(mpmath.sqrt(mpmath.mpf("3.25")) - mpmath.mpf("0.5"))
    assert B.schramm_F(2, 1, 0.5) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(1.302776, abs=1e-6)
    assert B.schramm_F(3, 0.7, 0.7) == pytest.approx(3 - 0.7)
    assert 0 < B.schramm_F(2, 1, 1e8) < 1e-7


def test_schramm_lower_examples():
    assert B.schramm_intersection_lower(2, 1, 2) == pytest.approx(
        math.pi * (math.sqrt(4 - 1 / 12) - 0.5) ** 2)
    # sqrt(4 - 1/12) - 1/2 = 1.4790575..., so the bound is 6.87258 (quoted elsewhere as 6.8724)
    assert B.schramm_intersection_lower(2, 1, 2) == pytest.approx(6.872578412, abs=1e-9)
    assert B.schramm_intersection_lower(2, 1e-9, 3) == pytest.approx(8 * omega(3), rel=1e-6)
    for d in (2, 3, 7):
        r, lam = 1.9, 0.8
        jung = math.sqrt(2 * d / (d + 1)) * lam / 2
        assert B.schramm_intersection_lower(r, lam, d) == pytest.approx(
            omega(d) * B.schramm_F(r, jung, lam / 2) ** d)


def test_radii():
    assert B.jung_radius(1, 2) == pytest.approx(1 / math.sqrt(3))
    assert B.bohnenblust_radius(1, 2) == pytest.approx(2 / 3)
    assert B.jung_radius(1, 10**6) == pytest.approx(math.sqrt(2) / 2, abs=1e-6)
    assert all(B.jung_radius(1, d) < B.CR_FACTOR for d in range(1, 500))


def test_thresholds():
    assert B.meets_threshold(4, 2, 2) and not B.meets_threshold(4, 2, 3)
    assert B.meets_threshold(9, 2, 3)
    assert B.meets_threshold(math.ceil(2.359 ** 3), 3, 2.359)
    assert not B.meets_threshold(math.ceil(2.359 ** 3) - 1, 3, 2.359)


def test_nth_root_perfect_powers():
    for d in range(1, 40):
        assert B.nth_root(2 ** d, d) == 2.0
        assert B.nth_root(3 ** d, d) == 3.0
    assert B.nth_root(10, 3) == pytest.approx(10 ** (1 / 3), rel=1e-15)


def test_anchor_and_final_inequalities():
    a = B.anchor_value()
    assert round(a, 6) == 2.358780
    assert a < 2.359
    assert B.ineq_21(1.573 / 2, 1.0) == (True, pytest.approx(2.359 - a))
    f = B.final_inequalities(0.4, 1.0, 2, 4)
    assert f["ineq-21"] is None  # x = 0.8 < 1
    N = math.ceil(2.359 ** 3)
    for x in (1.573, 2.0, 5.0):
        assert B.ineq_20(x / 2, 1.0, 3, N)[0]


def test_f_decreasing_samples():
    f = lambda x: x - math.sqrt(x * x - 1)
    assert f(2) == pytest.approx(0.2679, abs=1e-4)
    assert f(3) == pytest.approx(0.1716, abs=1e-4)
    assert f(2) > f(3)


def test_domain_errors():
    with pytest.raises(ValueError):
        B.union_upper(0, 1, 2, 4)
    with pytest.raises(ValueError):
        B.union_upper(1, 1, 0, 4)
    with pytest.raises(ValueError):
        B.union_lower(1, 1, 2, 0.5, 4)
    with pytest.raises(ValueError):
        B.schramm_intersection_lower(0.1, 1, 2)
    with pytest.raises(ValueError):
        B.ineq_21(0.4, 1.0)


def test_report_examples():
    rep = B.bounds_report(1, 1, 2, 4, V_K=4)
    assert rep.value("union-2") == pytest.approx(9)
    assert rep.value("union-4") == pytest.approx(9)
    assert rep.value("threshold-2d") is True
    assert rep.value("threshold-3d") is False
    rep = B.bounds_report(3, 1, 2, 9, V_K=4)
    assert rep.value("intersection-7") == pytest.approx(16)
    assert rep.value("intersection-3") == pytest.approx((3 - 2 / 3) ** 2 * 4)
    assert rep.value("intersection-3") == pytest.approx(21.78, abs=0.01)
    assert set(B.REPORT_KEYS) <= set(rep.entries)
    rep = B.bounds_report(1.573 / 2, 1, 2, 4)
    assert rep["ineq-21"].value is True
    assert rep["ineq-21"].margin == pytest.approx(0.00022, abs=1e-5)


def test_report_marks_clamping_and_d0():
    rep = B.bounds_report(0.4, 1, 2, 100, V_K=4, d0=10, cr=3)
    assert rep["intersection-7"].clamped and rep.value("intersection-7") == 0
    assert "d0" in rep["kl-density"].note
    assert "bezdek-1" in rep.entries
    assert not rep["extra-2"].applicable
    with pytest.raises(KeyError):
        rep.value("extra-2")


def test_theorem_two_slack_chain_sampled():
    rng = np.random.default_rng(0)
    for _ in range(500):
        d = int(rng.integers(2, 9))
        lam = float(rng.uniform(0.1, 3))
        r = lam * float(rng.uniform(1.01, 10))
        N = 3 ** d + int(rng.integers(0, 100))
        up = B.intersection_upper(r, lam, d, N, 1.0)
        assert up <= (r - lam) ** d * (1 + 1e-12)
        assert (r - lam) ** d < B.intersection_lower_bohnenblust(r, lam, d, 1.0)
