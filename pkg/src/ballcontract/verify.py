"""Interval-aware checks of the volume inequalities on concrete instances.

Every check compares two :class:`Quantity` objects, each a value with an
interval (degenerate for exact values).  A ``<=`` claim

* fails only when the intervals witness a violation (``lhs.lo > rhs.hi``),
* passes when ``lhs.hi <= rhs.lo``,
* is inconclusive otherwise.

A tolerance of ``tol * max(1, |lhs|, |rhs|)`` absorbs floating point noise in
exact comparisons.  Monte Carlo failures are re-run with ten times the
samples and a fresh stream; only a reproduced violation stays a failure.

Checks carry a *mode*: ``theorem`` (end-to-end claim with its hypotheses
met), ``chain`` (an intermediate inequality of the argument), ``formula``
(closed-form arithmetic), ``observational`` (hypotheses unmet; recorded but
never counted as a failure) and ``not-applicable``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from . import bounds, polygons, streams
from .ball_bodies import BallRegion, is_empty, molecule, polyhedron, r_hull
from .configurations import circumradius, diameter
from .estimates import QuermassEstimate, VolumeEstimate
from .instances import REGIMES, UniformContractionInstance, gen_instance, gen_packed
from .norms import NormBody, omega, parse_norm, support
from .volumetry import exact_area_2d, mc_volume, mean_width_hull, quermass_kubota

VERDICTS = ("pass", "fail", "inconclusive")
MODES = ("theorem", "chain", "formula", "observational", "not-applicable")
COUNTED_MODES = ("theorem", "chain", "formula")
SUMMAND_DIRECTIONS = 720
CSV_COLUMNS = ("instance-id", "check-id", "verdict", "lhs", "lhs-lo", "lhs-hi",
               "rhs", "rhs-lo", "rhs-hi", "slack", "seed")


@dataclass(frozen=True)
class Quantity:
    """A value with an enclosing interval and the method that produced it."""

    value: float
    lo: float
    hi: float
    method: str = "exact"
    seed: int | None = None
    samples: int = 0

    @classmethod
    def exact(cls, value: float, method: str = "exact") -> "Quantity":
        v = float(value)
        return cls(v, v, v, method)

    @classmethod
    def of(cls, est: VolumeEstimate | QuermassEstimate) -> "Quantity":
        if isinstance(est, QuermassEstimate):
            method = "exact" if est.lo == est.hi else ("heuristic" if est.heuristic else "monte-carlo")
            return cls(float(est.value), float(est.lo), float(est.hi), method, est.seed,
                       est.direction_samples)
        return cls(float(est.value), float(est.lo), float(est.hi), est.method, est.seed,
                   est.samples)

    @property
    def is_random(self) -> bool:
        return self.method in ("monte-carlo", "heuristic")

    def map_increasing(self, fn: Callable[[float], float], method: str | None = None) -> "Quantity":
        """Image under an increasing function, interval endpoints mapped directly."""
        return Quantity(fn(self.value), fn(self.lo), fn(self.hi),
                        method or ("closed-form" if self.lo == self.hi else self.method),
                        self.seed, self.samples)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CheckResult:
    check_id: str
    verdict: str
    lhs: Quantity | None = None
    rhs: Quantity | None = None
    relation: str = "<="
    mode: str = "theorem"
    notes: list[str] = field(default_factory=list)
    seed: int | None = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def slack(self) -> float | None:
        """``rhs - lhs`` for ``<=`` claims, ``-|rhs - lhs|`` for equalities."""
        if self.lhs is None or self.rhs is None:
            return None
        diff = self.rhs.value - self.lhs.value
        return -abs(diff) if self.relation == "==" else diff

    @property
    def counted_fail(self) -> bool:
        return self.verdict == "fail" and self.mode in COUNTED_MODES

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "verdict": self.verdict,
            "mode": self.mode,
            "relation": self.relation,
            "lhs": None if self.lhs is None else self.lhs.to_dict(),
            "rhs": None if self.rhs is None else self.rhs.to_dict(),
            "slack": self.slack,
            "seed": self.seed,
            "notes": list(self.notes),
        }


def compare(lhs: Quantity, rhs: Quantity, relation: str = "<=", tol: float = 1e-9) -> str:
    t = tol * max(1.0, abs(lhs.value), abs(rhs.value))
    if relation == "<=":
        if lhs.lo > rhs.hi + t:
            return "fail"
        if lhs.hi <= rhs.lo + t:
            return "pass"
        return "inconclusive"
    if relation == "==":
        if lhs.lo > rhs.hi + t or rhs.lo > lhs.hi + t:
            return "fail"
        return "pass"
    raise ValueError(f"unknown relation {relation!r}")


def not_applicable(check_id: str, reason: str) -> CheckResult:
    return CheckResult(check_id, "inconclusive", mode="not-applicable", notes=[reason])


@dataclass(frozen=True)
class MCParams:
    """Sampling parameters shared by all checks of a run."""

    samples: int = 200_000
    confidence: float = 0.99
    seed: int = 0
    jobs: int = 1
    exact_2d: bool = True
    direction_samples: int = 128
    vol_samples: int = 10_000
    tol: float = 1e-9
    confirm_factor: int = 10

    def __post_init__(self):
        if self.samples < 1 or self.direction_samples < 2 or self.vol_samples < 1:
            raise ValueError("sample counts must be positive")
        if not 0.5 < self.confidence < 1:
            raise ValueError("confidence must lie in (0.5, 1)")

    def confirm(self) -> "MCParams":
        f = self.confirm_factor
        return replace(self, samples=self.samples * f, vol_samples=self.vol_samples * f,
                       direction_samples=self.direction_samples * f,
                       seed=streams.derive_seed(self.seed, "confirm"))


def decide(check_id: str, lhs_fn: Callable[[MCParams], Quantity],
           rhs_fn: Callable[[MCParams], Quantity], params: MCParams, relation: str = "<=",
           mode: str = "theorem", notes: list[str] | None = None) -> CheckResult:
    """Evaluate both sides and compare, re-running random failures at higher precision."""
    notes = list(notes or [])
    lhs, rhs = lhs_fn(params), rhs_fn(params)
    verdict = compare(lhs, rhs, relation, params.tol)
    if verdict == "fail" and (lhs.is_random or rhs.is_random):
        strong = params.confirm()
        lhs2, rhs2 = lhs_fn(strong), rhs_fn(strong)
        again = compare(lhs2, rhs2, relation, params.tol)
        if again == "fail":
            notes.append(f"violation reproduced with {params.confirm_factor}x samples")
            lhs, rhs = lhs2, rhs2
        else:
            notes.append(f"violation not reproduced with {params.confirm_factor}x samples ({again})")
            verdict = "inconclusive"
    seed = lhs.seed if lhs.seed is not None else rhs.seed
    return CheckResult(check_id, verdict, lhs, rhs, relation, mode, notes, seed)


class _Evaluator:
    """Memoized volumes of the regions of one instance."""

    def __init__(self, inst: UniformContractionInstance, base_seed: int):
        self.inst = inst
        self.base_seed = base_seed
        self.K = inst.norm
        self._memo: dict = {}

    def points(self, which: str) -> np.ndarray:
        return self.inst.P if which == "P" else self.inst.Q

    def region(self, kind: str, which: str, r: float) -> BallRegion:
        return BallRegion(kind, self.points(which), r, self.K)

    def volume(self, kind: str, which: str, r: float, params: MCParams) -> Quantity:
        key = ("vol", kind, which, r, params.samples, params.seed)
        if key not in self._memo:
            region = self.region(kind, which, r)
            if params.exact_2d and region.dim == 2 and self.K.is_polytope:
                est = exact_area_2d(region)
            else:
                seed = streams.derive_seed(params.seed, self.base_seed, kind, which, repr(r))
                est = mc_volume(region, params.samples, seed, params.confidence, params.jobs)
            self._memo[key] = Quantity.of(est)
        return self._memo[key]

    @property
    def unit_volume(self) -> Quantity:
        return Quantity.of(self.K.unit_volume)

    def circumradius(self, which: str) -> Quantity:
        key = ("cr", which)
        if key not in self._memo:
            cb = circumradius(self.points(which), self.K)
            method = "exact" if cb.gap == 0 else "certified"
            self._memo[key] = Quantity(cb.radius + 0.0, cb.radius - cb.gap + 0.0, cb.radius + 0.0, method)
        return self._memo[key]

    def quermass(self, which: str, r: float, k: int, params: MCParams) -> Quantity:
        if k == 0:
            return self.volume("molecule", which, r, params)
        key = ("W", which, r, k, params.direction_samples, params.vol_samples, params.seed)
        if key not in self._memo:
            seed = streams.derive_seed(params.seed, self.base_seed, "quermass", which, k)
            est = quermass_kubota(molecule(self.points(which), r, self.K), k,
                                  params.direction_samples, params.vol_samples, seed,
                                  params.confidence)
            self._memo[key] = Quantity.of(est)
        return self._memo[key]


def _instance_seed(inst: UniformContractionInstance) -> int:
    return streams.derive_seed(inst.seed, "verify")


# -- union volume checks -------------------------------------------------------


def check_union_theorem(inst: UniformContractionInstance, params: MCParams,
                        ev: _Evaluator | None = None) -> list[CheckResult]:
    """Volumes of ``Q_r`` and ``P_r`` against each other and against the closed-form bounds."""
    ev = ev or _Evaluator(inst, _instance_seed(inst))
    d, N, lam, r = inst.dim, inst.N, inst.lam, inst.r
    threshold = N >= 2 ** d
    thm_mode = "theorem" if threshold else "observational"
    thm_notes = [] if threshold else [f"N = {N} < 2^d = {2 ** d}: theorem hypothesis unmet"]
    VK = ev.unit_volume
    out = []

    def vol_Q(p):
        return ev.volume("molecule", "Q", r, p)

    def vol_P(p):
        return ev.volume("molecule", "P", r, p)

    upper = VK.map_increasing(lambda v: bounds.union_upper(r, lam, d, v))
    lower = VK.map_increasing(lambda v: bounds.union_lower(r, lam, d, N, v))

    out.append(decide("thm1-end-to-end", vol_Q, vol_P, params, mode=thm_mode, notes=thm_notes))
    out.append(decide("union-2-iso", vol_Q, lambda p: upper, params, mode="chain"))
    if r >= lam / 2:
        out.append(decide("union-4-bm", lambda p: lower, vol_P, params, mode="chain",
                          notes=["Brunn-Minkowski growth of the lambda/2-molecule by r - lambda/2"]))
    else:
        out.append(not_applicable("union-4-bm", "needs r >= lambda/2"))
    diam_q = diameter(inst.Q, inst.norm)
    out.append(decide("union-1-diam", lambda p: Quantity.exact(diam_q + 2 * r),
                      lambda p: Quantity.exact(lam + 2 * r), params, mode="chain",
                      notes=["diam_K(Q_r) = diam_K(Q) + 2r"]))
    packing = VK.map_increasing(lambda v: N * (lam / 2) ** d * v)
    out.append(decide("indirect-2-packing", lambda p: ev.volume("molecule", "P", lam / 2, p),
                      lambda p: packing, params, relation="==", mode="chain"))
    if threshold:
        # both bounds are multiples of V_K, so compare them at one V_K value
        vk = VK.value
        out.append(decide("union-threshold",
                          lambda p: Quantity.exact(bounds.union_upper(r, lam, d, vk), "closed-form"),
                          lambda p: Quantity.exact(bounds.union_lower(r, lam, d, N, vk), "closed-form"),
                          params, mode="chain", notes=["closed forms coincide at N = 2^d"]))
    else:
        out.append(not_applicable("union-threshold", f"needs N >= 2^d = {2 ** d}"))

    # bound-chain transitivity: exact passes of both bounds force the end-to-end pass
    by_id = {c.check_id: c for c in out}
    b, c, a = by_id["union-2-iso"], by_id["union-4-bm"], by_id["thm1-end-to-end"]
    if (threshold and b.verdict == "pass" and c.verdict == "pass" and by_id["union-threshold"].verdict == "pass"
            and not (b.lhs.is_random or c.rhs.is_random) and a.verdict != "pass"):
        out.append(CheckResult("union-chain-consistency", "fail", a.lhs, a.rhs, mode="chain",
                               notes=["bounds pass but end-to-end does not: harness inconsistency"]))
    return out


# -- intersection volume checks ------------------------------------------------


def check_summand_identity(X, r: float, K: NormBody, directions: int = SUMMAND_DIRECTIONS,
                           tol: float = 1e-9) -> CheckResult:
    """Support-function test of ``X^r - conv_r(X) = rK`` on a planar polytopal norm.

    For unit vectors ``u`` of a uniform fan,
    ``h(X^r, u) + h(conv_r(X), -u)`` must equal ``r h_K(u)``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if K.dim != 2 or not K.is_polytope:
        raise ValueError("summand identity check needs a planar polytopal norm")
    cr = circumradius(X, K).radius
    if cr > r * (1 + 1e-12):
        raise ValueError(f"circumradius {cr} exceeds r = {r}")
    body = polyhedron(X, r, K).polygon
    hull = r_hull(X, r, K).polygon
    t = 2 * np.pi * np.arange(directions) / directions
    u = np.column_stack([np.cos(t), np.sin(t)])
    lhs = polygons.support(body, u) + polygons.support(hull, -u)
    rhs = r * support(K, u)
    err = float(np.max(np.abs(lhs - rhs)))
    scale = max(1.0, float(np.max(np.abs(rhs))), float(np.max(np.abs(X))))
    verdict = "pass" if err <= tol * scale else "fail"
    return CheckResult("intersection-5-summand", verdict, Quantity.exact(err),
                       Quantity.exact(tol * scale), mode="chain",
                       notes=[f"max support deviation over {directions} directions"])


def check_bm_corollary(X, r: float, K: NormBody, tol: float = 1e-9) -> CheckResult:
    """``V(X^r)^{1/2} + V(conv_r(X))^{1/2} <= r V_K^{1/2}`` with exact planar areas."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    body = exact_area_2d(polyhedron(X, r, K)).value
    hull = exact_area_2d(r_hull(X, r, K)).value
    vk = K.unit_volume.value
    lhs = Quantity.exact(math.sqrt(body) + math.sqrt(hull))
    rhs = Quantity.exact(r * math.sqrt(vk))
    return CheckResult("intersection-6-bm", compare(lhs, rhs, "<=", tol), lhs, rhs, mode="chain")


def check_intersection_theorem(inst: UniformContractionInstance, params: MCParams,
                               ev: _Evaluator | None = None) -> list[CheckResult]:
    """Volumes of ``P^r`` and ``Q^r`` against each other and against the closed-form bounds."""
    ev = ev or _Evaluator(inst, _instance_seed(inst))
    K = inst.norm
    d, N, lam, r = inst.dim, inst.N, inst.lam, inst.r
    generating = K.generating
    threshold = N >= 3 ** d
    gen_notes = [] if generating == "yes" else [f"unit ball generating: {generating}"]
    thr_notes = [] if threshold else [f"N = {N} < 3^d = {3 ** d}"]
    thm_mode = "theorem" if generating == "yes" and threshold else "observational"
    gen_mode = "chain" if generating == "yes" else "observational"
    VK = ev.unit_volume
    out = []

    def vol_P(p):
        return ev.volume("polyhedron", "P", r, p)

    def vol_Q(p):
        return ev.volume("polyhedron", "Q", r, p)

    out.append(decide("intersection-1", lambda p: Quantity.exact(lam), lambda p: ev.circumradius("P"),
                      params, mode="chain" if threshold else "observational", notes=thr_notes))
    out.append(decide("bohnenblust", lambda p: ev.circumradius("Q"),
                      lambda p: Quantity.exact(bounds.bohnenblust_radius(lam, d)), params, mode="chain"))
    lower = VK.map_increasing(lambda v: bounds.intersection_lower_bohnenblust(r, lam, d, v))
    out.append(decide("intersection-3", lambda p: lower, vol_Q, params, mode="chain"))
    upper = VK.map_increasing(lambda v: bounds.intersection_upper(r, lam, d, N, v))
    empty_note = ["P^r is empty"] if is_empty(ev.region("polyhedron", "P", r)) else []
    out.append(decide("intersection-7", vol_P, lambda p: upper, params, mode=gen_mode,
                      notes=gen_notes + empty_note))

    def santalo(p):
        A = ev.volume("molecule", "P", lam / 2, p)
        R = r + lam / 2

        def f(va, vk):
            if R <= (va / vk) ** (1 / d):
                return 0.0
            return bounds.blaschke_santalo_bound(va, R, d, vk)
        return Quantity(f(A.value, VK.value), f(A.hi, VK.lo), f(A.lo, VK.hi),
                        "closed-form" if A.lo == A.hi and VK.lo == VK.hi else "monte-carlo",
                        A.seed, A.samples)

    packing_radius = nth = bounds.nth_root(N, d) * lam / 2
    if r + lam / 2 > packing_radius:
        out.append(decide("remark3-chain", vol_P, santalo, params, mode=gen_mode,
                          notes=gen_notes + ["A = lambda/2-molecule of P, radius r + lambda/2"]))
    else:
        out.append(not_applicable("remark3-chain",
                                  f"r + lambda/2 must exceed the volumetric radius {nth!r}"))
    if threshold:
        vk = VK.value
        out.append(decide("intersection-chain",
                          lambda p: Quantity.exact(bounds.intersection_upper(r, lam, d, N, vk)),
                          lambda p: Quantity.exact(bounds.intersection_lower_bohnenblust(r, lam, d, vk)),
                          params,
                          mode="chain", notes=["packing bound below Bohnenblust bound for N >= 3^d"]))
    else:
        out.append(not_applicable("intersection-chain", f"needs N >= 3^d = {3 ** d}"))
    out.append(decide("thm2-end-to-end", vol_P, vol_Q, params, mode=thm_mode,
                      notes=gen_notes + thr_notes + empty_note))

    cr = ev.circumradius("P").value
    if d == 2 and K.is_polytope and cr <= r:
        out.append(check_summand_identity(inst.P, r, K, tol=params.tol))
        out.append(check_bm_corollary(inst.P, r, K, tol=params.tol))
    else:
        reason = ("needs a planar polytopal norm" if not (d == 2 and K.is_polytope)
                  else "needs cr_K(P) <= r")
        out.append(not_applicable("intersection-5-summand", reason))
        out.append(not_applicable("intersection-6-bm", reason))
    return out


# -- Quermassintegrals -----------------------------------------------------------


def check_quermass_theorem(inst: UniformContractionInstance, k: int, params: MCParams,
                           ev: _Evaluator | None = None) -> list[CheckResult]:
    """``W_k`` of the Euclidean unions and of their convex hulls against the bounds."""
    K = inst.norm
    if not K.is_euclidean:
        raise ValueError("quermassintegral checks need the Euclidean norm")
    ev = ev or _Evaluator(inst, _instance_seed(inst))
    d, N, lam, r = inst.dim, inst.N, inst.lam, inst.r
    if not 0 <= k <= d:
        raise ValueError(f"k must lie in [0, {d}]")
    if k == d:
        w = Quantity.exact(omega(d))
        return [CheckResult("thm3i-quermass", "pass", w, w, mode="observational",
                            notes=["k = d: both sides equal omega_d; not a theorem case"])]
    if r < lam / 2:
        return [not_applicable(cid, "needs r >= lambda/2")
                for cid in ("thm3i-quermass", "extra-1-upper", "extra-2-lower")]
    threshold = N >= 2 ** d
    thm_mode = "theorem" if threshold else "observational"
    thm_notes = [] if threshold else [f"N = {N} < 2^d = {2 ** d}: theorem hypothesis unmet"]
    tag = [f"k = {k}"] + (["nested Monte Carlo interval (heuristic)"] if k > 0 else [])
    out = []

    def WQ(p):
        return ev.quermass("Q", r, k, p)

    def WP(p):
        return ev.quermass("P", r, k, p)

    up = Quantity.exact(bounds.quermass_union_upper(r, lam, d, k), "closed-form")
    lo = Quantity.exact(bounds.quermass_union_lower(r, lam, d, N, k), "closed-form")
    out.append(decide("thm3i-quermass", WQ, WP, params, mode=thm_mode, notes=tag + thm_notes))
    out.append(decide("extra-1-upper", WQ, lambda p: up, params, mode="chain", notes=tag))
    out.append(decide("extra-2-lower", lambda p: lo, WP, params, mode="chain", notes=tag))

    def ball(p):
        seed = streams.derive_seed(p.seed, ev.base_seed, "kubota-ball", k)
        return Quantity.of(quermass_kubota(molecule(np.zeros((1, d)), r, K), k,
                                           p.direction_samples, p.vol_samples, seed, p.confidence))
    out.append(decide("kubota-ball", ball, lambda p: Quantity.exact(r ** (d - k) * omega(d)),
                      params, relation="==", mode="chain", notes=tag))

    if k == d - 1:
        def width(which):
            def fn(p):
                seed = streams.derive_seed(p.seed, ev.base_seed, "mean-width", which)
                return Quantity.of(mean_width_hull(ev.points(which), r, p.direction_samples * 8,
                                                   seed, p.confidence))
            return fn
        out.append(decide("thm3i-conv-mean-width", width("Q"), width("P"), params,
                          mode=thm_mode, notes=thm_notes))
        out.append(decide("union-22222-conv", width("Q"), lambda p: up, params, mode="chain"))
        out.append(decide("union-222222-conv", lambda p: lo, width("P"), params, mode="chain"))
    return out


# -- Formula layer -----------------------------------------------------------------


def _count_check(check_id: str, violations: int, total: int, notes: list[str],
                 mode: str = "formula") -> CheckResult:
    verdict = "pass" if violations == 0 else "fail"
    return CheckResult(check_id, verdict, Quantity.exact(violations), Quantity.exact(0),
                       relation="==", mode=mode, notes=[f"{violations} of {total}"] + notes)


def check_part_ii_formulas(n_tuples: int = 10_000, grid: int = 100, seed: int = 0,
                           max_dim: int = 12, packings: bool = True) -> list[CheckResult]:
    """The arithmetic closing the high-dimensional intersection argument.

    ``ineq-19-20-equiv`` compares the two forms of the radius inequality on
    random valid tuples; ``ineq-21-implies-20`` samples tuples satisfying the
    dimension-free form and the ``2.359^d`` threshold; ``f-decreasing`` and
    ``schramm-mono`` are finite-difference checks on grids; ``anchor-2.359``
    is the numeric anchor; ``bkl-circumradius`` (observational) tests the
    circumradius lower bound on small-dimensional packings.
    """
    rng = streams.generator(seed, "part-ii")
    out = []

    # the radius-ratio form and the dimension-free form must agree
    raw = tolerant = 0
    for _ in range(n_tuples):
        d = int(rng.integers(2, max_dim + 1))
        lam = float(10 ** rng.uniform(-1, 1))
        c = (d - 1) / (d + 1)
        x = float(math.sqrt(c) + 10 ** rng.uniform(-3, 1))
        N = int(rng.integers(1, 4 ** d + 1))
        r = x * lam / 2
        a, _ = bounds.ineq_19(r, lam, d, N)
        b, margin = bounds.ineq_20(r, lam, d, N)
        if a != b:
            raw += 1
            if abs(margin) > 1e-12 * max(1.0, bounds.nth_root(N, d)):
                tolerant += 1
    out.append(_count_check("ineq-19-20-equiv", tolerant, n_tuples,
                            [f"{raw} raw disagreements (ties within 1e-12 excluded)"]))

    # the anchored sufficient condition must imply the dimension-free form
    bad = 0
    for _ in range(n_tuples):
        d = int(rng.integers(2, max_dim + 1))
        lam = float(10 ** rng.uniform(-1, 1))
        x = float(bounds.ANCHOR_X + 10 ** rng.uniform(-4, 1))
        N = math.ceil(bounds.ANCHOR_BOUND ** d) + int(rng.integers(0, 3 ** d))
        r = x * lam / 2
        holds21, _ = bounds.ineq_21(r, lam)
        if holds21 and not bounds.ineq_20(r, lam, d, N)[0]:
            bad += 1
    out.append(_count_check("ineq-21-implies-20", bad, n_tuples, []))

    # f(x) = x - sqrt(x^2 - 1) positive and decreasing for x > 1
    xs = 1 + np.geomspace(1e-6, 1e3, 100_000)
    f = xs - np.sqrt(xs * xs - 1)
    bad = int(np.count_nonzero(f <= 0) + np.count_nonzero(np.diff(f) > 1e-15))
    out.append(_count_check("f-decreasing", bad, len(xs), []))

    anchor = bounds.anchor_value()
    ok = anchor < bounds.ANCHOR_BOUND and round(anchor, 6) == 2.35878
    out.append(CheckResult("anchor-2.359", "pass" if ok else "fail", Quantity.exact(anchor),
                           Quantity.exact(bounds.ANCHOR_BOUND), mode="formula",
                           notes=[f"x = {bounds.ANCHOR_X}: {anchor:.6f}"]))

    out.append(check_schramm_monotonicity(grid))

    jung_bad = sum(bounds.jung_radius(1.0, d) >= bounds.CR_FACTOR for d in range(2, 201))
    out.append(_count_check("jung-below-0.7865", jung_bad, 199, ["d = 2..200, lambda = 1"]))

    if packings:
        out.extend(_bkl_observations())
    return out


def check_schramm_monotonicity(grid: int = 100, tol: float = 1e-9) -> CheckResult:
    """F positive, decreasing and convex in ``x``, decreasing in ``rho``, on a ``grid^3`` lattice."""
    mu = np.linspace(1.0, 10.0, grid)[:, None, None]
    rho = mu * np.linspace(0.01, 0.99, grid)[None, :, None]
    x = np.geomspace(0.01, 100.0, grid)[None, None, :]
    F = bounds.schramm_F(mu, rho, x)
    positive = int(np.count_nonzero(F <= 0))
    dx = np.diff(F, axis=2)
    decreasing_x = int(np.count_nonzero(dx > tol))
    # convexity on a nonuniform grid: slopes must not decrease
    slopes = dx / np.diff(x, axis=2)
    convex = int(np.count_nonzero(np.diff(slopes, axis=2) < -tol))
    decreasing_rho = int(np.count_nonzero(np.diff(F, axis=1) > tol))
    bad = positive + decreasing_x + convex + decreasing_rho
    return _count_check("schramm-mono", bad, F.size, [
        f"nonpositive {positive}, increasing in x {decreasing_x}, "
        f"concave steps {convex}, increasing in rho {decreasing_rho}"])


def _bkl_observations() -> list[CheckResult]:
    out = []
    for d in (2, 3):
        N = math.ceil(bounds.ANCHOR_BOUND ** d)
        for strategy in ("lattice", "dart"):
            P = gen_packed(d, N, 1.0, NormBody.euclidean(d), strategy, seed=d)
            cr = circumradius(P, NormBody.euclidean(d)).radius
            res = decide("bkl-circumradius", lambda p: Quantity.exact(bounds.CR_FACTOR),
                         lambda p: Quantity.exact(cr), MCParams(), mode="observational",
                         notes=[f"d = {d}, N = {N}, {strategy}: guaranteed only for d >= d0"])
            out.append(res)
    return out


# -- Suites -----------------------------------------------------------------------------


@dataclass
class SuiteConfig:
    """Instance matrix and sampling parameters of a verification run.

    ``jobs`` only affects speed; it is not echoed in reports.
    """

    seed: int
    dims: tuple[int, ...] = (2, 3)
    norms: tuple[str, ...] = ("euclid", "l1", "linf", "lp:3")
    regimes: tuple[str, ...] = REGIMES
    instances_per_regime: int = 1
    n_values: dict[int, tuple[int, ...]] = field(default_factory=lambda: {2: (4, 9), 3: (8, 27)})
    lam: float = 1.0
    strategies: tuple[str, ...] = ("lattice", "dart")
    samples: int = 100_000
    confidence: float = 0.99
    quermass_k: tuple[int, ...] = (1,)
    direction_samples: int = 64
    vol_samples: int = 5_000
    formulas: bool = True
    formula_tuples: int = 10_000
    formula_grid: int = 100
    jobs: int = 1

    def __post_init__(self):
        if self.seed is None:
            raise ValueError("a suite needs an explicit seed")
        self.seed = int(self.seed)
        self.dims = tuple(int(d) for d in self.dims)
        self.norms = tuple(self.norms)
        self.regimes = tuple(self.regimes)
        self.strategies = tuple(self.strategies)
        self.quermass_k = tuple(int(k) for k in self.quermass_k)
        self.n_values = {int(d): tuple(int(n) for n in ns) for d, ns in self.n_values.items()}
        if self.instances_per_regime < 0:
            raise ValueError("instance counts must be nonnegative")
        if min((self.samples, self.direction_samples, self.vol_samples, self.formula_tuples,
                self.formula_grid)) < 1:
            raise ValueError("sample counts must be positive")
        if not 0.5 < self.confidence < 1:
            raise ValueError("confidence must lie in (0.5, 1)")
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        for reg in self.regimes:
            if reg not in REGIMES:
                raise ValueError(f"unknown regime {reg!r}")
        for d in self.dims:
            if d not in self.n_values:
                raise ValueError(f"no N values configured for dimension {d}")
            for norm in self.norms:
                parse_norm(norm, d)

    def params(self) -> MCParams:
        return MCParams(samples=self.samples, confidence=self.confidence, seed=self.seed,
                        direction_samples=self.direction_samples, vol_samples=self.vol_samples)

    def echo(self) -> dict:
        out = asdict(self)
        out.pop("jobs")
        out["n_values"] = {str(d): list(ns) for d, ns in self.n_values.items()}
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown suite config fields {sorted(unknown)}")
        if "seed" not in doc:
            raise ValueError("suite config needs a seed")
        return cls(**doc)


@dataclass
class InstanceRecord:
    instance_id: str
    summary: dict
    checks: list[CheckResult]

    def to_dict(self) -> dict:
        return {"instance_id": self.instance_id, "instance": self.summary,
                "checks": [c.to_dict() for c in self.checks]}


@dataclass
class SuiteReport:
    config: dict
    records: list[InstanceRecord]

    def aggregate(self) -> dict[str, dict[str, int]]:
        table: dict[str, dict[str, int]] = {}
        for rec in self.records:
            for c in rec.checks:
                row = table.setdefault(c.check_id, {k: 0 for k in (
                    "pass", "fail", "inconclusive", "obs-pass", "obs-fail", "obs-inconclusive", "n/a")})
                if c.mode == "not-applicable":
                    row["n/a"] += 1
                elif c.mode == "observational":
                    row["obs-" + c.verdict] += 1
                else:
                    row[c.verdict] += 1
        return table

    @property
    def fail_count(self) -> int:
        return sum(c.counted_fail for rec in self.records for c in rec.checks)

    @property
    def exit_code(self) -> int:
        return 1 if self.fail_count else 0

    def to_json(self) -> str:
        doc = {"config": self.config,
               "records": [r.to_dict() for r in self.records],
               "aggregate": self.aggregate(),
               "fails": self.fail_count}
        return json.dumps(doc, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in self.records:
            for c in rec.checks:
                lhs = c.lhs or Quantity(math.nan, math.nan, math.nan)
                rhs = c.rhs or Quantity(math.nan, math.nan, math.nan)
                w.writerow([rec.instance_id, c.check_id, c.verdict,
                            *(repr(v) for v in (lhs.value, lhs.lo, lhs.hi, rhs.value, rhs.lo, rhs.hi)),
                            "" if c.slack is None else repr(c.slack),
                            "" if c.seed is None else c.seed])
        return buf.getvalue()

    def to_text(self) -> str:
        table = self.aggregate()
        cols = ("pass", "fail", "inconclusive", "obs-pass", "obs-fail", "obs-inconclusive", "n/a")
        width = max([len("check-id")] + [len(k) for k in table])
        lines = ["check-id".ljust(width) + "  " + "  ".join(c.rjust(6) for c in cols)]
        for key in sorted(table):
            lines.append(key.ljust(width) + "  " + "  ".join(str(table[key][c]).rjust(max(6, len(c)))
                                                             for c in cols))
        lines.append("")
        lines.append(f"instances: {len(self.records)}; counted fails: {self.fail_count}")
        for rec in self.records:
            for c in rec.checks:
                if c.counted_fail:
                    lines.append(f"FAIL {rec.instance_id} {c.check_id}: lhs {c.lhs.value!r} "
                                 f"rhs {c.rhs.value!r} ({'; '.join(c.notes)})")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "machine":
            return self.to_json()
        if fmt == "text":
            return self.to_text()
        if fmt == "csv-table":
            return self.to_csv()
        raise ValueError(f"unknown report format {fmt!r}")


def instance_summary(inst: UniformContractionInstance) -> dict:
    return {"dim": inst.dim, "norm": inst.norm.name or inst.norm.kind, "N": inst.N,
            "lambda": inst.lam, "r": inst.r, "regime": inst.regime, "seed": inst.seed,
            "cr_P": inst.cr, "notes": list(inst.notes)}


def verify_instance(inst: UniformContractionInstance, params: MCParams,
                    quermass_k: tuple[int, ...] = ()) -> list[CheckResult]:
    """All applicable checks of one instance, sharing memoized volumes."""
    ev = _Evaluator(inst, _instance_seed(inst))
    out = check_union_theorem(inst, params, ev) + check_intersection_theorem(inst, params, ev)
    if inst.norm.is_euclidean:
        for k in quermass_k:
            if 0 <= k <= inst.dim:
                out += check_quermass_theorem(inst, k, params, ev)
    return out


def _plan(config: SuiteConfig) -> list[tuple]:
    plan = []
    for d in config.dims:
        for norm in config.norms:
            for N in config.n_values[d]:
                for ri, regime in enumerate(config.regimes):
                    for i in range(config.instances_per_regime):
                        strategy = config.strategies[(REGIMES.index(regime) + i) % len(config.strategies)]
                        iid = f"d{d}-{norm}-N{N}-{regime}-{i}"
                        seed = streams.derive_seed(config.seed, iid)
                        plan.append((iid, d, norm, N, regime, strategy, seed))
    return plan


def run_suite(config: SuiteConfig, jobs: int | None = None) -> SuiteReport:
    """Generate the configured instances, verify each, and assemble the report in plan order."""
    jobs = config.jobs if jobs is None else jobs
    params = config.params()

    def work(item) -> InstanceRecord:
        iid, d, norm, N, regime, strategy, seed = item
        K = parse_norm(norm, d)
        inst = gen_instance(d, N, config.lam, K, regime, seed, strategy=strategy)
        return InstanceRecord(iid, instance_summary(inst),
                              verify_instance(inst, params, config.quermass_k))

    records = streams.ordered_map(work, _plan(config), jobs=jobs)
    if config.formulas:
        checks = check_part_ii_formulas(config.formula_tuples, config.formula_grid,
                                        streams.derive_seed(config.seed, "formulas"))
        records.append(InstanceRecord("formulas", {}, checks))
    return SuiteReport(config.echo(), records)


__all__ = [
    "CheckResult", "InstanceRecord", "MCParams", "Quantity", "SuiteConfig", "SuiteReport",
    "check_bm_corollary", "check_intersection_theorem", "check_part_ii_formulas",
    "check_quermass_theorem", "check_schramm_monotonicity", "check_summand_identity",
    "check_union_theorem", "compare", "decide", "run_suite", "verify_instance",
]
