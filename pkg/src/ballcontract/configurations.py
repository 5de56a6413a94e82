"""Finite point sets in a Minkowski space and their metric invariants."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog, minimize, nnls

from .norms import GAUGE_TOL, NormBody, gauge, support


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    """An ordered, labeled list of ``N`` points in ``R^d``."""

    points: np.ndarray
    label: str = ""

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("a configuration needs at least one point")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.points)

    def translate(self, v) -> "PointConfiguration":
        return PointConfiguration(self.points + np.asarray(v, dtype=float), self.label)

    def scale(self, t: float) -> "PointConfiguration":
        return PointConfiguration(self.points * t, self.label)


def as_points(X, K: NormBody | None = None) -> np.ndarray:
    pts = X.points if isinstance(X, PointConfiguration) else np.atleast_2d(np.asarray(X, dtype=float))
    if pts.size == 0:
        raise ValueError("empty point set")
    if K is not None and pts.shape[1] != K.dim:
        raise ValueError(f"points have dimension {pts.shape[1]}, norm has dimension {K.dim}")
    return pts


def pairwise_gauges(X, K: NormBody) -> np.ndarray:
    """``N x N`` matrix of gauge distances ``||x_i - x_j||_K``."""
    pts = as_points(X, K)
    out = np.empty((len(pts), len(pts)))
    for i, p in enumerate(pts):
        out[i] = gauge(K, p - pts)
    return out


def diameter(X, K: NormBody) -> float:
    pts = as_points(X, K)
    if len(pts) == 1:
        return 0.0
    return float(pairwise_gauges(pts, K).max())


def min_separation(X, K: NormBody) -> float:
    pts = as_points(X, K)
    if len(pts) == 1:
        return float("inf")
    g = pairwise_gauges(pts, K)
    return float(g[np.triu_indices(len(pts), 1)].min())


class Circumball(NamedTuple):
    """Smallest enclosing ball: radius, a witnessing center and a certified gap.

    ``gap`` is zero for exact methods; for iterative ones the true circumradius
    lies in ``[radius - gap, radius]``.
    """

    radius: float
    center: np.ndarray
    gap: float = 0.0


def circumradius(X, K: NormBody, max_iter: int = 500) -> Circumball:
    """Circumradius ``cr_K(X)`` and a Chebyshev center of a finite set."""
    pts = as_points(X, K)
    if len(pts) == 1 or np.all(pts == pts[0]):
        return Circumball(0.0, pts[0].copy())
    if K.is_euclidean:
        c, r = smallest_enclosing_ball(pts)
        return Circumball(float(np.max(np.linalg.norm(pts - c, axis=1))), c)
    if K.is_polytope:
        return _circumradius_lp(pts, K)
    return _circumradius_convex(pts, K, max_iter)


def _circumradius_lp(pts: np.ndarray, K: NormBody) -> Circumball:
    a = K.facets
    n, d = pts.shape
    # variables (x, R): a_k . (p_i - x) <= R
    rows = -np.tile(a, (n, 1))
    a_ub = np.hstack([rows, -np.ones((len(rows), 1))])
    b_ub = -(pts @ a.T).reshape(-1)
    c = np.zeros(d + 1)
    c[-1] = 1.0
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (d + 1), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"circumradius LP failed: {res.message}")
    radius = float(res.x[-1])
    # among optimal centers pick the l1-closest to the centroid
    slack = radius + GAUGE_TOL * max(1.0, radius)
    centroid = pts.mean(axis=0)
    c2 = np.concatenate([np.zeros(d), np.ones(d)])
    a2 = np.vstack([
        np.hstack([rows, np.zeros((len(rows), d))]),
        np.hstack([np.eye(d), -np.eye(d)]),
        np.hstack([-np.eye(d), -np.eye(d)]),
    ])
    b2 = np.concatenate([
        slack - (pts @ a.T).reshape(-1),
        centroid,
        -centroid,
    ])
    res2 = linprog(c2, A_ub=a2, b_ub=b2, bounds=[(None, None)] * d + [(0, None)] * d,
                   method="highs-ds")
    center = res2.x[:d] if res2.status == 0 else res.x[:d]
    return Circumball(max(radius, 0.0), center)


def _circumradius_convex(pts: np.ndarray, K: NormBody, max_iter: int) -> Circumball:
    """Minimize ``x -> max_i ||p_i - x||`` and certify a lower bound by duality."""
    d = pts.shape[1]
    x0 = smallest_enclosing_ball(pts)[0]
    r0 = float(np.max(gauge(K, pts - x0)))
    res = minimize(
        lambda z: z[-1],
        np.append(x0, r0),
        jac=lambda z: np.append(np.zeros(d), 1.0),
        constraints=[{"type": "ineq", "fun": lambda z: z[-1] - gauge(K, pts - z[:-1])}],
        method="SLSQP",
        options={"maxiter": max_iter, "ftol": 1e-14},
    )
    x = res.x[:d] if np.all(np.isfinite(res.x)) else x0
    g = gauge(K, pts - x)
    upper = float(g.max())
    if upper > r0:
        x, g, upper = x0, gauge(K, pts - x0), r0
    lower = _dual_lower_bound(pts, K, x, g, upper)
    return Circumball(upper, x, max(0.0, upper - lower))


def _dual_lower_bound(pts, K, x, g, upper) -> float:
    # For weights w on near-active points and dual unit vectors u_i (subgradients),
    # max_i ||p_i - y|| >= sum w_i u_i.(p_i - y) >= sum w_i u_i.(p_i - p_0) - D ||sum w_i u_i||_*
    # for every y in B_K[p_0, D] with D = diam, which contains some optimal center.
    active = np.flatnonzero(g >= upper * (1 - 1e-3))
    v = pts[active] - x
    u = np.array([_dual_unit(K, w) for w in v])
    big = 1e3
    mat = np.vstack([u.T, big * np.ones(len(active))])
    rhs = np.append(np.zeros(pts.shape[1]), big)
    w, _ = nnls(mat, rhs)
    if w.sum() <= 0:
        return 0.0
    w = w / w.sum()
    resid = u.T @ w
    D = diameter(pts, K)
    base = float(np.sum(w * np.einsum("ij,ij->i", u, pts[active] - pts[0])))
    dual_resid = float(support(K, resid)) if np.any(resid != 0) else 0.0
    return max(D / 2.0, base - D * dual_resid)


def _dual_unit(K: NormBody, w: np.ndarray, h: float = 1e-7) -> np.ndarray:
    """Gradient of the gauge at ``w`` (a dual-unit vector) by central differences."""
    d = len(w)
    # the gauge is positively homogeneous, so its gradient only depends on the direction
    w = w / np.abs(w).max()
    grad = np.empty(d)
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        grad[k] = (gauge(K, w + e) - gauge(K, w - e)) / (2 * e[k])
    # rescale so the dual norm is exactly one and u.w = ||w||
    return grad / support(K, grad)


def smallest_enclosing_ball(pts, seed: int = 0) -> tuple[np.ndarray, float]:
    """Euclidean smallest enclosing ball by Welzl's incremental recursion.

    The recursion depth is bounded by ``d + 1``; points are visited in a
    seeded random order so the expected running time is linear.
    """
    pts = np.asarray(pts, dtype=float)
    n, d = pts.shape
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [pts[i] for i in order]
    center, r2 = _welzl(shuffled, len(shuffled), [], d)
    return center, float(np.sqrt(max(r2, 0.0)))


def _welzl(pts: list, end: int, boundary: list, d: int):
    center, r2 = _ball_through(boundary, d) if boundary else (pts[0].copy(), 0.0)
    if len(boundary) == d + 1:
        return center, r2
    for i in range(end):
        p = pts[i]
        if np.sum((p - center) ** 2) > r2 * (1 + 1e-12) + 1e-24:
            center, r2 = _welzl(pts, i, boundary + [p], d)
    return center, r2


def _ball_through(boundary: list, d: int) -> tuple[np.ndarray, float]:
    """Smallest ball with all ``boundary`` points on its sphere."""
    s0 = boundary[0]
    if len(boundary) == 1:
        return s0.copy(), 0.0
    a = np.array([b - s0 for b in boundary[1:]])
    rhs = 0.5 * np.sum(a * a, axis=1)
    lam, *_ = np.linalg.lstsq(a @ a.T, rhs, rcond=None)
    center = s0 + a.T @ lam
    return center, float(np.sum((center - s0) ** 2))


def volumetric_radius(volume: float, K: NormBody) -> float:
    """Radius of the ``K``-ball whose volume equals ``volume``."""
    if volume <= 0:
        raise ValueError("volume must be positive")
    return float((volume / K.unit_volume.value) ** (1.0 / K.dim))


@dataclass(frozen=True)
class ContractionCertificate:
    """Outcome of checking that ``Q`` is a uniform contraction of ``P``.

    Pairs are reported with 1-based labels ``(i, j)``, ``i < j``.  A margin is
    the amount by which the worst pair misses the separating value.
    """

    passed: bool
    lam: float
    p_min: float
    q_max: float
    p_pair: tuple[int, int] | None
    q_pair: tuple[int, int] | None
    p_violation: tuple[int, int] | None = None
    p_margin: float = 0.0
    q_violation: tuple[int, int] | None = None
    q_margin: float = 0.0

    @property
    def violation(self) -> tuple[str, tuple[int, int], float] | None:
        if self.p_violation is not None:
            return ("P", self.p_violation, self.p_margin)
        if self.q_violation is not None:
            return ("Q", self.q_violation, self.q_margin)
        return None

    def describe(self) -> str:
        if self.passed:
            return (f"uniform contraction certified: min_P = {self.p_min:.17g} >= "
                    f"lambda = {self.lam:.17g} >= max_Q = {self.q_max:.17g}")
        side, pair, margin = self.violation
        return f"{side}-side pair {pair} violates lambda = {self.lam:.17g} by {margin:.6g}"


def extreme_pair(g: np.ndarray, largest: bool) -> tuple[tuple[int, int], float]:
    iu = np.triu_indices(len(g), 1)
    vals = g[iu]
    k = int(np.argmax(vals) if largest else np.argmin(vals))
    return (int(iu[0][k]) + 1, int(iu[1][k]) + 1), float(vals[k])


def certify_uniform_contraction(P, Q, lam: float, K: NormBody,
                                tol: float = GAUGE_TOL) -> ContractionCertificate:
    """Check ``||q_i - q_j|| <= lam <= ||p_i - p_j||`` for all ``i < j``."""
    p = as_points(P, K)
    q = as_points(Q, K)
    if len(p) != len(q):
        raise ValueError(f"cardinality mismatch: |P| = {len(p)}, |Q| = {len(q)}")
    if len(p) < 2:
        raise ValueError("need at least two points")
    if lam <= 0:
        raise ValueError("separating value must be positive")
    p_pair, p_min = extreme_pair(pairwise_gauges(p, K), largest=False)
    q_pair, q_max = extreme_pair(pairwise_gauges(q, K), largest=True)
    p_bad = p_min < lam - tol
    q_bad = q_max > lam + tol
    return ContractionCertificate(
        passed=not (p_bad or q_bad), lam=lam, p_min=p_min, q_max=q_max,
        p_pair=p_pair, q_pair=q_pair,
        p_violation=p_pair if p_bad else None, p_margin=lam - p_min if p_bad else 0.0,
        q_violation=q_pair if q_bad else None, q_margin=q_max - lam if q_bad else 0.0,
    )
