"""Minkowski unit balls: gauges, support functions, volumes and generating-set rules.

A :class:`NormBody` is an o-symmetric convex body ``K``.  Four representations
are supported:

``euclidean``
    the Euclidean unit ball.
``lp``
    the l_p unit ball; ``p`` in ``{1, 2, inf}`` has closed forms everywhere,
    other ``p > 1`` are handled numerically.
``polytope-h``
    ``K = {x : |a_i . x| <= 1 for all i}`` for facet normals ``a_i``.
``polytope-v``
    ``K = conv{+-v_j}`` for a vertex list closed under negation.

Functions accept batches: a vector argument of shape ``(..., d)`` yields a
result of shape ``(...)``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .estimates import VolumeEstimate

GAUGE_TOL = 1e-9
GEOM_TOL = 1e-7

KINDS = ("euclidean", "lp", "polytope-h", "polytope-v")
GENERATING = ("yes", "no", "unknown")

UNIT_VOLUME_SAMPLES = 400_000
UNIT_VOLUME_SEED = 20_240_601


def omega(d: int) -> float:
    """Volume of the d-dimensional Euclidean unit ball, via log-gamma."""
    if d < 0:
        raise ValueError("dimension must be nonnegative")
    return math.exp(0.5 * d * math.log(math.pi) - math.lgamma(1 + 0.5 * d))


def _dedupe_rows(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    keep: list[np.ndarray] = []
    for row in a:
        if not any(np.max(np.abs(row - k)) <= tol * (1 + np.max(np.abs(k))) for k in keep):
            keep.append(row)
    return np.array(keep)


@dataclass(frozen=True, eq=False)
class NormBody:
    """An o-symmetric convex body defining the norm of a Minkowski space."""

    dim: int
    kind: str
    p: float | None = None
    normals: np.ndarray | None = None
    vertices: np.ndarray | None = None
    blocks: tuple[tuple[int, ...], ...] | None = None
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or not (self.p >= 1):
                raise ValueError("lp norms need p >= 1")
            object.__setattr__(self, "p", float(self.p))
        if self.kind == "polytope-h":
            a = np.atleast_2d(np.asarray(self.normals, dtype=float))
            if a.shape[1] != self.dim:
                raise ValueError("facet normals have the wrong dimension")
            if np.any(np.all(a == 0.0, axis=1)):
                raise ValueError("facet normals must be nonzero")
            a.setflags(write=False)
            object.__setattr__(self, "normals", a)
        if self.kind == "polytope-v":
            v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
            if v.shape[1] != self.dim:
                raise ValueError("vertices have the wrong dimension")
            if not _closed_under_negation(v):
                raise ValueError("vertex list must be closed under negation")
            v.setflags(write=False)
            object.__setattr__(self, "vertices", v)
        if self.blocks is not None:
            blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
            flat = sorted(itertools.chain.from_iterable(blocks))
            if flat != list(range(self.dim)):
                raise ValueError("blocks must partition the coordinate axes")
            object.__setattr__(self, "blocks", blocks)
        # nonempty interior and boundedness
        e = np.eye(self.dim)
        g = gauge(self, e)
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValueError("unit ball must be bounded with nonempty interior")

    # -- constructors -----------------------------------------------------

    @classmethod
    def euclidean(cls, dim: int) -> "NormBody":
        return cls(dim, "euclidean", name="euclid")

    @classmethod
    def lp(cls, dim: int, p: float) -> "NormBody":
        p = float(p)
        label = {1.0: "l1", math.inf: "linf"}.get(p, f"lp:{p:g}")
        return cls(dim, "lp", p=p, name=label)

    @classmethod
    def polytope_h(cls, normals, blocks=None, name: str = "poly-h") -> "NormBody":
        a = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls(a.shape[1], "polytope-h", normals=a, blocks=blocks, name=name)

    @classmethod
    def polytope_v(cls, vertices, blocks=None, name: str = "poly-v") -> "NormBody":
        v = np.atleast_2d(np.asarray(vertices, dtype=float))
        return cls(v.shape[1], "polytope-v", vertices=v, blocks=blocks, name=name)

    # -- derived structure ------------------------------------------------

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "euclidean" or (self.kind == "lp" and self.p == 2.0)

    @property
    def is_polytope(self) -> bool:
        return self.kind in ("polytope-h", "polytope-v") or (
            self.kind == "lp" and self.p in (1.0, math.inf))

    @cached_property
    def facets(self) -> np.ndarray:
        """Irredundant facet normals ``a`` with ``K = {x : a . x <= 1}``."""
        if not self.is_polytope:
            raise ValueError(f"{self.kind} unit ball is not a polytope")
        d = self.dim
        if self.kind == "lp" and self.p == math.inf:
            return np.vstack([np.eye(d), -np.eye(d)])
        if self.kind == "lp":
            return np.array(list(itertools.product((1.0, -1.0), repeat=d)))
        if d == 1:
            w = _width_1d(self)
            return np.array([[1.0 / w], [-1.0 / w]])
        hull = ConvexHull(self.polytope_vertices)
        eq = _dedupe_rows(hull.equations)
        return eq[:, :-1] / (-eq[:, -1:])

    @cached_property
    def polytope_vertices(self) -> np.ndarray:
        """Vertices of a polytopal unit ball (a symmetric list)."""
        if not self.is_polytope:
            raise ValueError(f"{self.kind} unit ball is not a polytope")
        d = self.dim
        if self.kind == "lp" and self.p == math.inf:
            return np.array(list(itertools.product((1.0, -1.0), repeat=d)))
        if self.kind == "lp":
            return np.vstack([np.eye(d), -np.eye(d)])
        if d == 1:
            w = _width_1d(self)
            return np.array([[w], [-w]])
        if self.kind == "polytope-v":
            hull = ConvexHull(self.vertices)
            return self.vertices[np.sort(hull.vertices)]
        a = np.vstack([self.normals, -self.normals])
        halfspaces = np.hstack([a, -np.ones((len(a), 1))])
        pts = HalfspaceIntersection(halfspaces, np.zeros(d)).intersections
        pts = _dedupe_rows(pts)
        hull = ConvexHull(pts)
        return pts[np.sort(hull.vertices)]

    @cached_property
    def polygon(self) -> np.ndarray:
        """Counter-clockwise vertex cycle of a planar polytopal unit ball."""
        if self.dim != 2:
            raise ValueError("polygon is only defined in the plane")
        v = self.polytope_vertices
        ang = np.arctan2(v[:, 1], v[:, 0])
        return v[np.argsort(ang, kind="stable")]

    @cached_property
    def unit_volume(self) -> VolumeEstimate:
        return unit_ball_volume(self)

    @cached_property
    def generating(self) -> str:
        return classify_generating(self)

    def descriptor(self) -> dict:
        """JSON-ready norm descriptor (see the instance file format)."""
        out: dict = {"kind": self.kind}
        if self.kind == "lp":
            out["p"] = "inf" if self.p == math.inf else self.p
        if self.kind == "polytope-h":
            out["normals"] = self.normals.tolist()
        if self.kind == "polytope-v":
            out["vertices"] = self.vertices.tolist()
        if self.blocks is not None:
            out["blocks"] = [list(b) for b in self.blocks]
        return out

    def __eq__(self, other):
        if not isinstance(other, NormBody):
            return NotImplemented
        return self.dim == other.dim and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash((self.dim, repr(self.descriptor())))

    def __repr__(self):
        return f"NormBody(dim={self.dim}, kind={self.kind!r}, name={self.name!r})"


def _closed_under_negation(v: np.ndarray) -> bool:
    for row in v:
        if not np.any(np.all(np.abs(v + row) <= 1e-12 * (1 + np.abs(row)), axis=1)):
            return False
    return True


def _width_1d(K: NormBody) -> float:
    if K.kind == "polytope-h":
        return 1.0 / float(np.max(np.abs(K.normals[:, 0])))
    return float(np.max(np.abs(K.vertices[:, 0])))


def from_descriptor(desc: dict, dim: int | None = None) -> NormBody:
    """Build a :class:`NormBody` from a JSON norm descriptor."""
    kind = desc.get("kind")
    blocks = desc.get("blocks")
    if kind == "euclidean":
        if dim is None:
            raise ValueError("euclidean descriptor needs a dimension")
        return NormBody.euclidean(dim)
    if kind == "lp":
        if dim is None:
            raise ValueError("lp descriptor needs a dimension")
        p = desc.get("p")
        p = math.inf if isinstance(p, str) and p.lower() in ("inf", "infinity") else float(p)
        return NormBody(dim, "lp", p=p, blocks=blocks,
                        name={1.0: "l1", math.inf: "linf"}.get(p, f"lp:{p:g}"))
    if kind == "polytope-h":
        K = NormBody.polytope_h(desc["normals"], blocks=blocks)
    elif kind == "polytope-v":
        K = NormBody.polytope_v(desc["vertices"], blocks=blocks)
    else:
        raise ValueError(f"unknown norm kind {kind!r}")
    if dim is not None and K.dim != dim:
        raise ValueError(f"norm descriptor has dimension {K.dim}, expected {dim}")
    return K


def _check_dim(K: NormBody, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (K.dim,):
        raise ValueError(f"expected vectors of dimension {K.dim}, got shape {x.shape}")
    return x


def gauge(K: NormBody, x) -> np.ndarray | float:
    """The Minkowski norm ``||x||_K = min{t >= 0 : x in tK}``."""
    x = _check_dim(K, x)
    if K.is_euclidean:
        out = np.linalg.norm(x, axis=-1)
    elif K.kind == "lp":
        out = _lp_norm(x, K.p)
    elif K.kind == "polytope-h":
        out = np.max(np.abs(x @ K.normals.T), axis=-1)
    else:
        # facet form of conv(+-v_j); gauge_lp is the LP reference route
        out = np.maximum(np.max(x @ K.facets.T, axis=-1), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def _lp_norm(x: np.ndarray, p: float) -> np.ndarray:
    ax = np.abs(x)
    if p == math.inf:
        return np.max(ax, axis=-1)
    if p == 1.0:
        return np.sum(ax, axis=-1)
    m = np.max(ax, axis=-1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((ax / safe[..., None]) ** p, axis=-1) ** (1.0 / p)


def gauge_lp(K: NormBody, x) -> float:
    """Gauge of a single vector for a ``polytope-v`` body, solved as a linear program.

    Minimizes ``sum |alpha_j|`` subject to ``sum alpha_j v_j = x`` over one
    representative of each vertex pair.
    """
    if K.kind != "polytope-v":
        raise ValueError("gauge_lp applies to polytope-v bodies")
    x = _check_dim(K, x)
    reps = _pair_representatives(K.vertices)
    m = len(reps)
    c = np.ones(2 * m)
    a_eq = np.hstack([reps.T, -reps.T])
    res = linprog(c, A_eq=a_eq, b_eq=x, bounds=[(0, None)] * (2 * m), method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"gauge LP failed: {res.message}")
    return float(res.fun)


def _pair_representatives(v: np.ndarray) -> np.ndarray:
    reps: list[np.ndarray] = []
    for row in v:
        if not any(np.allclose(row, r) or np.allclose(row, -r) for r in reps):
            reps.append(row)
    return np.array(reps)


def support(K: NormBody, u) -> np.ndarray | float:
    """Support function ``h_K(u) = max{x . u : x in K}``."""
    u = _check_dim(K, u)
    if np.any(np.all(u == 0.0, axis=-1)):
        raise ValueError("support function needs a nonzero direction")
    if K.is_euclidean:
        out = np.linalg.norm(u, axis=-1)
    elif K.kind == "lp":
        q = 1.0 if K.p == math.inf else (math.inf if K.p == 1.0 else K.p / (K.p - 1.0))
        out = _lp_norm(u, q)
    elif K.kind == "polytope-v":
        out = np.max(np.abs(u @ K.vertices.T), axis=-1)
    else:
        out = np.max(u @ K.polytope_vertices.T, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def support_lp(K: NormBody, u) -> float:
    """Support function of a ``polytope-h`` body for one direction, by linear programming."""
    if K.kind != "polytope-h":
        raise ValueError("support_lp applies to polytope-h bodies")
    u = _check_dim(K, u)
    a = np.vstack([K.normals, -K.normals])
    res = linprog(-u, A_ub=a, b_ub=np.ones(len(a)), bounds=[(None, None)] * K.dim,
                  method="highs-ds")
    if res.status != 0:
        raise RuntimeError(f"support LP failed: {res.message}")
    return float(-res.fun)


def unit_ball_volume(K: NormBody, samples: int = UNIT_VOLUME_SAMPLES,
                     seed: int = UNIT_VOLUME_SEED, confidence: float = 0.99) -> VolumeEstimate:
    """Lebesgue volume of ``K``: exact where a formula applies, else Monte Carlo."""
    d = K.dim
    if K.is_euclidean:
        return VolumeEstimate.exact(omega(d))
    if K.kind == "lp" and K.p == math.inf:
        return VolumeEstimate.exact(2.0 ** d)
    if K.kind == "lp" and K.p == 1.0:
        return VolumeEstimate.exact(2.0 ** d / math.factorial(d))
    if K.is_polytope and d == 1:
        return VolumeEstimate.exact(2.0 * _width_1d(K))
    if K.is_polytope and d == 2:
        return VolumeEstimate.exact(shoelace(K.polygon))
    if K.is_polytope and d == 3:
        return VolumeEstimate.exact(_fan_volume(K.polytope_vertices))
    return mc_body_volume(K, samples=samples, seed=seed, confidence=confidence)


def shoelace(poly: np.ndarray) -> float:
    """Area of a counter-clockwise polygon (signed; positive for CCW)."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _fan_volume(pts: np.ndarray) -> float:
    # signed simplices from the origin (interior) over the hull's triangulated facets
    hull = ConvexHull(pts)
    total = 0.0
    for simplex, eq in zip(hull.simplices, hull.equations):
        a, b, c = hull.points[simplex]
        vol = np.dot(a, np.cross(b, c)) / 6.0
        # orient each facet outward
        total += abs(vol) if eq[-1] < 0 else -abs(vol)
    return float(total)


def mc_body_volume(K: NormBody, samples: int, seed: int, confidence: float = 0.99,
                   jobs: int = 1) -> VolumeEstimate:
    """Monte Carlo volume of ``K`` by rejection against its bounding box."""
    from .volumetry import mc_hit_volume

    half = np.array([support(K, e) for e in np.eye(K.dim)])
    return mc_hit_volume(lambda y: (gauge(K, y) <= 1.0, None), -half, half,
                         samples=samples, seed=seed, confidence=confidence, jobs=jobs,
                         labels=("unit-ball", K.kind))


def bounding_box(K: NormBody, centers, r: float) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box containing the union of the balls ``c + rK``."""
    c = np.atleast_2d(np.asarray(centers, dtype=float))
    if c.size == 0:
        raise ValueError("need at least one center")
    c = _check_dim(K, c)
    half = r * np.array([support(K, e) for e in np.eye(K.dim)])
    return c.min(axis=0) - half, c.max(axis=0) + half


# -- generating sets --------------------------------------------------------

def _direct_sum_counts_feasible(d: int, n_vertices: int, n_facets: int) -> bool:
    odd = d % 2
    k = d // 2
    v_target = n_vertices // (2 if odd else 1)
    if odd and n_vertices % 2:
        return False
    f_target = n_facets - (2 if odd else 0)

    def search(k_left: int, v_left: int, f_left: int, m_min: int) -> bool:
        if k_left == 0:
            return v_left == 1 and f_left == 0
        m = m_min
        while m <= f_left:
            if v_left % m == 0 and search(k_left - 1, v_left // m, f_left - m, m):
                return True
            m += 2
        return False

    return search(k, v_target, f_target, 4)


def classify_generating(K: NormBody) -> str:
    """Decide whether ``K`` is a generating set: ``'yes'``, ``'no'`` or ``'unknown'``.

    Rules: every planar body and every Euclidean ball is generating; a
    symmetric polytope is generating exactly when it is a direct sum of
    polygons plus, in odd dimension, a segment.  That structure is confirmed
    only for axis-aligned boxes or against a declared block partition of the
    coordinates; it is refuted when the vertex and facet counts admit no
    product decomposition or the declared blocks fail.
    """
    d = K.dim
    if d <= 2 or K.is_euclidean:
        return "yes"
    if not K.is_polytope:
        return "unknown"
    a = K.facets
    nv = len(K.polytope_vertices)
    if not _direct_sum_counts_feasible(d, nv, len(a)):
        return "no"
    axis_aligned = np.all(np.count_nonzero(np.abs(a) > GEOM_TOL, axis=1) == 1)
    if axis_aligned:
        return "yes"
    if K.blocks is None:
        return "unknown"
    if any(len(b) > 2 for b in K.blocks):
        return "unknown"
    support_sets = [frozenset(np.flatnonzero(np.abs(row) > GEOM_TOL)) for row in a]
    block_sets = [frozenset(b) for b in K.blocks]
    if all(any(s <= b for b in block_sets) for s in support_sets):
        return "yes"
    return "no"


def parse_norm(text: str, dim: int) -> NormBody:
    """Build a norm from a shorthand.

    ``euclid``, ``l1``, ``linf``, ``lp:<p>``, ``poly-h:<file>`` or
    ``poly-v:<file>``.  A polytope file holds JSON: either a list of rows
    (facet normals or vertices) or an object with that list under
    ``normals``/``vertices`` and optional ``blocks``.
    """
    text = text.strip()
    if text in ("euclid", "euclidean", "l2"):
        return NormBody.euclidean(dim)
    if text == "l1":
        return NormBody.lp(dim, 1.0)
    if text == "linf":
        return NormBody.lp(dim, math.inf)
    head, _, arg = text.partition(":")
    if head == "lp" and arg:
        p = math.inf if arg.lower() in ("inf", "infinity") else float(arg)
        return NormBody.lp(dim, p)
    if head in ("poly-h", "poly-v") and arg:
        field = "normals" if head == "poly-h" else "vertices"
        doc = json.loads(Path(arg).read_text())
        rows, blocks = (doc, None) if isinstance(doc, list) else (doc[field], doc.get("blocks"))
        K = (NormBody.polytope_h if head == "poly-h" else NormBody.polytope_v)(
            rows, blocks=blocks, name=f"{head}:{Path(arg).name}")
        if K.dim != dim:
            raise ValueError(f"{arg} describes a {K.dim}-dimensional body, expected {dim}")
        return K
    raise ValueError(f"unknown norm shorthand {text!r}; expected euclid, l1, linf, "
                     "lp:<p>, poly-h:<file> or poly-v:<file>")
