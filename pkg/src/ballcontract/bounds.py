"""Closed-form volume and quermassintegral bounds for ball unions and intersections.

Every function here is pure.  Bounds whose radius could become negative are
clamped at zero (the empty set has volume zero), and :func:`bounds_report`
records a ``clamped`` flag for those.  :func:`bounds_report` gathers every
quantity under a stable string key so reports can be compared across runs.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .norms import omega

ANCHOR_X = 1.573
ANCHOR_BOUND = 2.359
CR_FACTOR = 0.7865
KL_EXPONENT = 0.599

REPORT_KEYS = (
    "union-2", "union-4", "intersection-3", "intersection-7", "blaschke-santalo",
    "union-22222", "union-222222", "extra-1", "extra-2", "schramm-F", "schramm-lower",
    "jung", "bohnenblust", "kl-density", "ineq-19", "ineq-20", "ineq-21",
    "threshold-2d", "threshold-3d", "threshold-1+sqrt2", "threshold-2.359",
)


def _positive(**kw) -> None:
    for name, v in kw.items():
        if isinstance(v, bool) or not (isinstance(v, numbers.Real) and v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")


def _dim(d) -> int:
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


def nth_root(N: float, d: int) -> float:
    """``N ** (1/d)`` with an exact result whenever ``N`` is a perfect ``d``-th power.

    The exact path is what makes the union bounds coincide bit-for-bit at
    ``N = 2**d``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    d = _dim(d)
    if float(N).is_integer():
        n = int(N)
        m = round(n ** (1.0 / d))
        for cand in (m - 1, m, m + 1):
            if cand > 0 and cand ** d == n:
                return float(cand)
    root = N ** (1.0 / d)
    # one Newton step on t^d = N tightens the last bit
    return root - (root ** d - N) / (d * root ** (d - 1))


def union_upper(r: float, lam: float, d: int, V_K: float) -> float:
    """``(r + lam/2)^d V_K``: the largest volume a ball union of a contracted set can have."""
    _positive(r=r, lam=lam, V_K=V_K)
    return (r + lam / 2) ** _dim(d) * V_K


def union_lower(r: float, lam: float, d: int, N: float, V_K: float) -> float:
    """``(r + (N^{1/d} - 1) lam/2)^d V_K``: the smallest volume of a ball union of a lam-separated set."""
    _positive(r=r, lam=lam, V_K=V_K)
    return (r + (nth_root(N, d) - 1) * lam / 2) ** _dim(d) * V_K


def _clamped_power(radius: float, d: int) -> tuple[float, bool]:
    if radius <= 0:
        return 0.0, True
    return radius ** d, False


def intersection_lower_bohnenblust(r: float, lam: float, d: int, V_K: float) -> float:
    """``max(0, r - d lam/(d+1))^d V_K``, from the circumradius bound of a set of diameter lam."""
    _positive(r=r, lam=lam, V_K=V_K)
    d = _dim(d)
    return _clamped_power(r - d * lam / (d + 1), d)[0] * V_K


def intersection_upper(r: float, lam: float, d: int, N: float, V_K: float) -> float:
    """``max(0, r - (N^{1/d} - 1) lam/2)^d V_K``."""
    _positive(r=r, lam=lam, V_K=V_K)
    d = _dim(d)
    return _clamped_power(r - (nth_root(N, d) - 1) * lam / 2, d)[0] * V_K


def blaschke_santalo_bound(volume_A: float, r: float, d: int, V_K: float) -> float:
    """Volume bound ``(r - r_K(A))^d V_K`` for the r-ball body of a set of volume ``volume_A``.

    ``r_K(A) = (volume_A / V_K)^{1/d}`` is the volumetric radius; the bound
    is only defined for ``r > r_K(A)``.
    """
    _positive(volume_A=volume_A, r=r, V_K=V_K)
    d = _dim(d)
    radius = (volume_A / V_K) ** (1.0 / d)
    if r <= radius:
        raise ValueError(f"r = {r} does not exceed the volumetric radius {radius}")
    return (r - radius) ** d * V_K


def _quermass_k(k, d) -> int:
    if int(k) != k or not 0 <= k < d:
        raise ValueError(f"k must be an integer in [0, {d})")
    return int(k)


def quermass_union_upper(r: float, lam: float, d: int, k: int) -> float:
    _positive(r=r, lam=lam)
    d = _dim(d)
    k = _quermass_k(k, d)
    return (r + lam / 2) ** (d - k) * omega(d)


def quermass_union_lower(r: float, lam: float, d: int, N: float, k: int) -> float:
    _positive(r=r, lam=lam)
    d = _dim(d)
    k = _quermass_k(k, d)
    return (r + (nth_root(N, d) - 1) * lam / 2) ** (d - k) * omega(d)


def schramm_F(mu, rho, x):
    """``sqrt(mu^2 - rho^2 + x^2) - x`` for ``mu > rho > 0`` and ``x > 0``.

    Accepts scalars or broadcastable arrays.
    """
    mu, rho, x = (np.asarray(v, dtype=float) for v in (mu, rho, x))
    if not (np.all(mu > rho) and np.all(rho > 0) and np.all(x > 0)):
        raise ValueError("need mu > rho > 0 and x > 0")
    # rationalized form avoids cancellation for large x
    gap = (mu - rho) * (mu + rho)
    out = gap / (np.sqrt(gap + x * x) + x)
    return float(out) if out.ndim == 0 else out


def jung_radius(lam: float, d: int) -> float:
    """Largest Euclidean circumradius of a set of diameter ``lam``."""
    _positive(lam=lam)
    d = _dim(d)
    return math.sqrt(2 * d / (d + 1)) * lam / 2


def bohnenblust_radius(lam: float, d: int) -> float:
    """Largest circumradius of a set of diameter ``lam`` in any ``d``-dimensional norm."""
    _positive(lam=lam)
    d = _dim(d)
    return d * lam / (d + 1)


def kl_density(d: int) -> float:
    """The packing density cap ``2^{-0.599 d}``."""
    return 2.0 ** (-KL_EXPONENT * _dim(d))


def schramm_intersection_lower(r: float, lam: float, d: int) -> float:
    """Euclidean volume bound ``omega_d max(0, sqrt(r^2 - c (lam/2)^2) - lam/2)^d``, ``c = (d-1)/(d+1)``."""
    _positive(r=r, lam=lam)
    d = _dim(d)
    if r <= jung_radius(lam, d):
        raise ValueError(f"r = {r} must exceed the Jung radius {jung_radius(lam, d)}")
    c = (d - 1) / (d + 1)
    radius = math.sqrt(r * r - c * (lam / 2) ** 2) - lam / 2
    return _clamped_power(radius, d)[0] * omega(d)


def anchor_value(x: float = ANCHOR_X) -> float:
    """``x - sqrt(x^2 - 1) + 2``; at ``x = 1.573`` this is just below 2.359."""
    if x <= 1:
        raise ValueError("need x > 1")
    return x - math.sqrt(x * x - 1) + 2


def ineq_19(r: float, lam: float, d: int, N: float) -> tuple[bool, float]:
    """Packing radius bound versus the Schramm radius.  Returns ``(holds, rhs - lhs)``."""
    _positive(r=r, lam=lam)
    d = _dim(d)
    c = (d - 1) / (d + 1)
    if r * r < c * (lam / 2) ** 2:
        raise ValueError("square root argument is negative")
    lhs = r - (nth_root(N, d) - 1) * lam / 2
    rhs = math.sqrt(r * r - c * (lam / 2) ** 2) - lam / 2
    return lhs <= rhs, rhs - lhs


def ineq_20(r: float, lam: float, d: int, N: float) -> tuple[bool, float]:
    """The same comparison after dividing by ``lam/2``: ``x - sqrt(x^2 - c) + 2 <= N^{1/d}``."""
    _positive(r=r, lam=lam)
    d = _dim(d)
    c = (d - 1) / (d + 1)
    x = 2 * r / lam
    if x * x < c:
        raise ValueError("need (2r/lam)^2 >= (d-1)/(d+1)")
    lhs = x - math.sqrt(x * x - c) + 2
    rhs = nth_root(N, d)
    return lhs <= rhs, rhs - lhs


def ineq_21(r: float, lam: float) -> tuple[bool, float]:
    """``x - sqrt(x^2 - 1) + 2 <= 2.359`` with ``x = 2r/lam > 1``."""
    _positive(r=r, lam=lam)
    x = 2 * r / lam
    if x <= 1:
        raise ValueError("need 2r/lam > 1")
    lhs = anchor_value(x)
    return lhs <= ANCHOR_BOUND, ANCHOR_BOUND - lhs


def final_inequalities(r: float, lam: float, d: int, N: float) -> dict[str, bool | None]:
    """Truth values of the three closing inequalities; ``None`` where undefined."""
    out: dict[str, bool | None] = {}
    for key, fn in (("ineq-19", lambda: ineq_19(r, lam, d, N)),
                    ("ineq-20", lambda: ineq_20(r, lam, d, N)),
                    ("ineq-21", lambda: ineq_21(r, lam))):
        try:
            out[key] = fn()[0]
        except ValueError:
            out[key] = None
    return out


THRESHOLD_BASES = {
    "threshold-2d": 2.0,
    "threshold-3d": 3.0,
    "threshold-1+sqrt2": 1.0 + math.sqrt(2.0),
    "threshold-2.359": ANCHOR_BOUND,
}


def meets_threshold(N: float, d: int, base: float) -> bool:
    """``N >= base^d``, decided exactly for integer bases."""
    d = _dim(d)
    if float(base).is_integer() and float(N).is_integer():
        return int(N) >= int(base) ** d
    return math.log(N) >= d * math.log(base)


def packing_ratio(N: float, lam: float, d: int, cr: float) -> float:
    """``N (lam/2)^d / (cr + lam)^d``, the packing density lower estimate given a circumradius."""
    _positive(lam=lam, cr=cr)
    d = _dim(d)
    return N * ((lam / 2) / (cr + lam)) ** d


@dataclass
class BoundEntry:
    """One evaluated quantity of a :class:`BoundsReport`."""

    key: str
    value: float | bool | None
    inputs: dict[str, Any]
    applicable: bool = True
    reason: str = ""
    clamped: bool = False
    margin: float | None = None
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class BoundsReport:
    inputs: dict[str, Any]
    entries: dict[str, BoundEntry] = field(default_factory=dict)

    def __getitem__(self, key: str) -> BoundEntry:
        return self.entries[key]

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def value(self, key: str):
        e = self.entries[key]
        if not e.applicable:
            raise KeyError(f"{key} is not applicable: {e.reason}")
        return e.value

    def to_dict(self) -> dict[str, Any]:
        return {"inputs": dict(self.inputs),
                "entries": {k: e.to_dict() for k, e in self.entries.items()}}

    def lines(self) -> list[str]:
        out = []
        for key, e in self.entries.items():
            if not e.applicable:
                out.append(f"{key}: not applicable ({e.reason})")
                continue
            v = e.value
            text = ("pass" if v else "fail") if isinstance(v, bool) else f"{v:.12g}"
            extra = []
            if e.margin is not None:
                extra.append(f"margin {e.margin:.6g}")
            if e.clamped:
                extra.append("clamped")
            if e.note:
                extra.append(e.note)
            echo = ", ".join(f"{k}={val}" for k, val in e.inputs.items())
            out.append(f"{key}: {text}" + (f" [{'; '.join(extra)}]" if extra else "") + f"  ({echo})")
        return out


def bounds_report(r: float, lam: float, d: int, N: float, V_K: float | None = None,
                  k: int | None = None, cr: float | None = None,
                  d0: int | None = None, x: float | None = None) -> BoundsReport:
    """Evaluate every bound, radius, threshold and inequality at one input tuple.

    ``V_K`` defaults to the Euclidean ``omega_d``; ``k`` selects the
    quermassintegral index (default 0); ``cr`` enables the packing density
    entry; ``d0`` annotates dimensions below the asymptotic guarantee; ``x``
    overrides ``2r/lam`` in the ``ineq-21`` and ``schramm-F`` entries.
    """
    _positive(r=r, lam=lam)
    d = _dim(d)
    if N < 1:
        raise ValueError("N must be at least 1")
    if V_K is None:
        V_K = omega(d)
    _positive(V_K=V_K)
    k = 0 if k is None else k
    report = BoundsReport({"r": r, "lambda": lam, "d": d, "N": N, "V_K": V_K, "k": k,
                           "cr": cr, "d0": d0})
    ent = report.entries
    vol_in = {"r": r, "lambda": lam, "d": d, "V_K": V_K}
    vol_n = {**vol_in, "N": N}
    below_d0 = f"d < d0 = {d0}: outside the asymptotic guarantee" if d0 is not None and d < d0 else ""

    def put(key, value, inputs, clamped=False, margin=None, note=""):
        ent[key] = BoundEntry(key, value, inputs, clamped=clamped, margin=margin, note=note)

    def skip(key, inputs, reason):
        ent[key] = BoundEntry(key, None, inputs, applicable=False, reason=reason)

    root = nth_root(N, d)
    put("union-2", union_upper(r, lam, d, V_K), vol_in)
    put("union-4", union_lower(r, lam, d, N, V_K), vol_n,
        note="" if r >= lam / 2 else "r < lambda/2: not a volume bound for the union")
    rad = r - d * lam / (d + 1)
    put("intersection-3", intersection_lower_bohnenblust(r, lam, d, V_K), vol_in, clamped=rad <= 0)
    rad = r - (root - 1) * lam / 2
    put("intersection-7", intersection_upper(r, lam, d, N, V_K), vol_n, clamped=rad <= 0)
    packing_volume = N * (lam / 2) ** d * V_K
    bs_in = {"volume_A": packing_volume, "r": r + lam / 2, "d": d, "V_K": V_K}
    if r + lam / 2 > (packing_volume / V_K) ** (1.0 / d):
        put("blaschke-santalo", blaschke_santalo_bound(packing_volume, r + lam / 2, d, V_K), bs_in,
            note="A = lambda/2-ball packing, radius r + lambda/2")
    else:
        skip("blaschke-santalo", bs_in, "r + lambda/2 does not exceed the volumetric radius")

    q_in = {"r": r, "lambda": lam, "d": d, "k": k}
    if 0 <= k < d:
        up = quermass_union_upper(r, lam, d, k)
        lo = quermass_union_lower(r, lam, d, N, k)
        put("union-22222", up, q_in)
        put("union-222222", lo, {**q_in, "N": N})
        put("extra-1", up, q_in)
        if r >= lam / 2:
            put("extra-2", lo, {**q_in, "N": N})
        else:
            skip("extra-2", {**q_in, "N": N}, "needs r >= lambda/2")
    else:
        for key in ("union-22222", "union-222222", "extra-1", "extra-2"):
            skip(key, q_in, f"k must lie in [0, {d})")

    jung = jung_radius(lam, d)
    xs = 2 * r / lam if x is None else x
    f_in = {"mu": r, "rho": jung, "x": lam / 2}
    if r > jung:
        put("schramm-F", schramm_F(r, jung, lam / 2), f_in)
        val = schramm_intersection_lower(r, lam, d)
        rad = math.sqrt(r * r - (d - 1) / (d + 1) * (lam / 2) ** 2) - lam / 2
        put("schramm-lower", val, {"r": r, "lambda": lam, "d": d}, clamped=rad <= 0,
            note="Euclidean unit ball")
    else:
        skip("schramm-F", f_in, "needs r above the Jung radius")
        skip("schramm-lower", {"r": r, "lambda": lam, "d": d}, "needs r above the Jung radius")

    put("jung", jung, {"lambda": lam, "d": d})
    put("bohnenblust", bohnenblust_radius(lam, d), {"lambda": lam, "d": d})
    put("kl-density", kl_density(d), {"d": d}, note=below_d0)

    ineq_in = {"r": r, "lambda": lam, "d": d, "N": N}
    for key, fn, inputs in (
        ("ineq-19", lambda: ineq_19(r, lam, d, N), ineq_in),
        ("ineq-20", lambda: ineq_20(r, lam, d, N), ineq_in),
        ("ineq-21", lambda: ineq_21(xs * lam / 2, lam), {"x": xs}),
    ):
        try:
            holds, margin = fn()
            put(key, holds, inputs, margin=margin)
        except ValueError as exc:
            skip(key, inputs, str(exc))

    for key, base in THRESHOLD_BASES.items():
        put(key, meets_threshold(N, d, base), {"N": N, "d": d, "base": base},
            note=below_d0 if key == "threshold-2.359" else "")

    if cr is not None:
        ratio = packing_ratio(N, lam, d, cr)
        cap = kl_density(d)
        put("bezdek-1", ratio, {"N": N, "lambda": lam, "d": d, "cr": cr},
            margin=cap - ratio, note=below_d0)
    return report
