"""Membership oracles for ball molecules, ball polyhedra and r-ball convex hulls.

For centers ``X`` and radius ``r`` in the norm of ``K``:

* the molecule is the union of the balls ``x + rK``,
* the polyhedron is their intersection,
* the r-ball hull is the intersection of all radius-``r`` balls containing
  ``X``; it equals the polyhedron of the polyhedron and is the whole space
  when the circumradius of ``X`` exceeds ``r``.

Each region exposes a *reach* function ``f`` with ``y in region <=> f(y) <= r``;
``f`` is 1-Lipschitz with respect to the norm, which the grid bounds rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from . import polygons
from .configurations import Circumball, as_points, circumradius
from .norms import GEOM_TOL, NormBody, gauge, support

KINDS = ("molecule", "polyhedron", "r_hull")

HULL_BAND = 1e-6
HULL_RAYS_PER_DIM = 4096
HULL_COARSE_STRIDE = 32
_CHUNK = 1 << 20


@dataclass(frozen=True, eq=False)
class BallRegion:
    """A union, intersection or r-ball hull of congruent balls."""

    kind: str
    centers: np.ndarray
    radius: float
    norm: NormBody
    hull_rays: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown region kind {self.kind!r}")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        c = as_points(self.centers, self.norm).copy()
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.norm.dim

    @cached_property
    def circumball(self) -> Circumball:
        return circumradius(self.centers, self.norm)

    @property
    def unbounded(self) -> bool:
        """True for an r-ball hull whose centers do not fit in a radius-r ball."""
        return self.kind == "r_hull" and self.circumball.radius > self.radius

    # -- polytopal structure ----------------------------------------------

    @cached_property
    def facet_offsets(self) -> np.ndarray:
        """Offsets ``b`` with the region equal to ``{y : a_k . y <= b_k}``.

        Only defined for polyhedra and r-ball hulls of polytopal norms; ``a_k``
        are the facet normals of the unit ball.
        """
        if not self.norm.is_polytope or self.kind == "molecule":
            raise ValueError("facet offsets need a polytopal norm and a convex region")
        a = self.norm.facets
        poly = self.radius + np.min(self.centers @ a.T, axis=0)
        if self.kind == "polyhedron":
            return poly
        if self.dim == 2:
            # the hull is cut out by the balls centered at the polyhedron's vertices
            vertices = polyhedron(self.centers, self.radius, self.norm).polygon
            if len(vertices) == 0:
                raise ValueError("r-ball hull of a set with circumradius above r is the whole plane")
            return self.radius + np.min(vertices @ a.T, axis=0)
        lows = []
        for ak in a:
            res = linprog(ak, A_ub=a, b_ub=poly, bounds=[(None, None)] * self.dim,
                          method="highs-ds")
            if res.status != 0:
                raise RuntimeError(f"hull LP failed: {res.message}")
            lows.append(res.fun)
        return self.radius + np.array(lows)

    @cached_property
    def polygon(self) -> np.ndarray:
        """Vertex cycle of a planar polytopal polyhedron or r-ball hull."""
        K = self.norm
        if self.dim != 2 or not K.is_polytope or self.kind == "molecule":
            raise ValueError("polygon needs a planar polytopal polyhedron or hull")
        a = K.facets
        base = self.radius + np.min(self.centers @ a.T, axis=0)
        start = self.centers[0] + self.radius * K.polygon
        poly = polygons.clip_all(start, a, base)
        if len(poly) == 0 and not is_empty(BallRegion("polyhedron", self.centers, self.radius, K)):
            # circumradius equal to r up to round-off: the polyhedron is the Chebyshev center
            poly = self.circumball.center[None, :].copy()
        if self.kind == "polyhedron":
            return poly
        if len(poly) == 0:
            raise ValueError("r-ball hull of a set with circumradius above r is the whole plane")
        offsets = self.radius + np.min(poly @ a.T, axis=0)
        hull = polygons.clip_all(poly[0] + self.radius * K.polygon, a, offsets)
        if len(hull) == 0:
            # zero-area hull: the clip degenerated, and conv(X) is a point or a segment
            hull = _segment_hull(self.centers)
        return hull

    @cached_property
    def hull_boundary(self) -> np.ndarray:
        """Boundary samples of the polyhedron, by ray shooting from the circumcenter."""
        rays = self.hull_rays or HULL_RAYS_PER_DIM * self.dim
        dirs = _direction_fan(self.dim, rays)
        c = self.circumball.center
        t = _ray_exit(self.norm, self.centers, self.radius, c, dirs)
        return c + t[:, None] * dirs

    # -- membership ---------------------------------------------------------

    def reach(self, y) -> np.ndarray | float:
        """Value ``f(y)`` with membership equivalent to ``f(y) <= radius``."""
        y = np.asarray(y, dtype=float)
        single = y.ndim == 1
        y = np.atleast_2d(y)
        if y.shape[1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}")
        if self.kind == "molecule":
            out = self._center_gauges(y, np.minimum)
        elif self.kind == "polyhedron":
            out = self._center_gauges(y, np.maximum)
        elif self.unbounded:
            out = np.full(len(y), -np.inf)
        elif self.norm.is_polytope:
            out = self.radius + np.max(y @ self.norm.facets.T - self.facet_offsets, axis=1)
        else:
            out = _max_gauge_to(self.norm, y, self.hull_boundary)
        return float(out[0]) if single else out

    def _center_gauges(self, y: np.ndarray, combine) -> np.ndarray:
        out = None
        for c in self.centers:
            g = gauge(self.norm, y - c)
            out = g if out is None else combine(out, g)
        return out

    def classify(self, y) -> tuple[np.ndarray, np.ndarray]:
        """Membership with an uncertainty flag.

        Only r-ball hulls of non-polytopal norms have uncertain points: those
        whose reach lies within ``HULL_BAND * radius`` of the radius.
        """
        if self.kind == "r_hull" and not self.norm.is_polytope and not self.unbounded:
            f = self._coarse_to_fine_reach(np.atleast_2d(np.asarray(y, dtype=float)))
            band = HULL_BAND * self.radius
            uncertain = np.abs(f - self.radius) <= band
            return (f < self.radius - band), uncertain
        f = np.atleast_1d(self.reach(y))
        return f <= self.radius, np.zeros(len(f), dtype=bool)

    @cached_property
    def _coarse_boundary(self) -> tuple[np.ndarray, float]:
        """Every ``HULL_COARSE_STRIDE``-th boundary sample and its covering radius."""
        full = self.hull_boundary
        coarse = full[::HULL_COARSE_STRIDE]
        cover = float(np.max(np.min(gauge(self.norm, full[:, None, :] - coarse[None, :, :]), axis=1)))
        return coarse, cover

    def _coarse_to_fine_reach(self, y: np.ndarray) -> np.ndarray:
        """Hull reach, exact wherever it could decide membership.

        The coarse maximum is a lower bound and exceeds the true value by at
        most the covering radius, so points far from the threshold keep the
        coarse value and only the rest are evaluated against every sample.
        """
        coarse, cover = self._coarse_boundary
        f = _max_gauge_to(self.norm, y, coarse)
        margin = 2 * HULL_BAND * self.radius
        open_ = (f <= self.radius + margin) & (f + cover >= self.radius - margin)
        if np.any(open_):
            f[open_] = _max_gauge_to(self.norm, y[open_], self.hull_boundary)
        return f

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        K = self.norm
        half = np.array([support(K, e) for e in np.eye(self.dim)])
        if self.kind == "molecule":
            return self.centers.min(axis=0) - self.radius * half, self.centers.max(axis=0) + self.radius * half
        if self.kind == "polyhedron":
            return self.centers.max(axis=0) - self.radius * half, self.centers.min(axis=0) + self.radius * half
        if self.unbounded:
            raise ValueError("r-ball hull is the whole space")
        # the hull lies in the circumball of its centers
        cb = self.circumball
        return cb.center - cb.radius * half, cb.center + cb.radius * half


def molecule(centers, r: float, K: NormBody) -> BallRegion:
    return BallRegion("molecule", centers, r, K)


def polyhedron(centers, r: float, K: NormBody) -> BallRegion:
    return BallRegion("polyhedron", centers, r, K)


def r_hull(centers, r: float, K: NormBody, rays: int | None = None) -> BallRegion:
    return BallRegion("r_hull", centers, r, K, hull_rays=rays)


def contains(region: BallRegion, y) -> np.ndarray | bool:
    """Membership test; undecided hull points count as members."""
    inside, uncertain = region.classify(y)
    out = inside | uncertain
    return bool(out[0]) if np.ndim(y) == 1 else out


def is_empty(region: BallRegion) -> bool:
    """Only a polyhedron can be empty, exactly when the circumradius exceeds the radius.

    Equality counts as nonempty: the circumcenter is then the single common point.
    """
    if region.kind != "polyhedron":
        return False
    return region.circumball.radius > region.radius + 1e-12 * max(1.0, region.radius)


def _segment_hull(X: np.ndarray) -> np.ndarray:
    """Extreme points of a (nearly) collinear planar set along its widest direction."""
    spread = X - X.mean(axis=0)
    if not np.any(spread):
        return X[:1].copy()
    axis = np.linalg.svd(spread, full_matrices=False)[2][0]
    t = spread @ axis
    return X[[int(np.argmin(t)), int(np.argmax(t))]].copy()


def _direction_fan(d: int, count: int) -> np.ndarray:
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if d == 3:
        # spherical Fibonacci lattice
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        phi = np.pi * (1 + 5 ** 0.5) * i
        s = np.sqrt(1 - z * z)
        return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])
    g = np.random.default_rng(12345).standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


def _ray_exit(K: NormBody, centers: np.ndarray, r: float, origin: np.ndarray,
              dirs: np.ndarray) -> np.ndarray:
    """Largest ``t >= 0`` with ``origin + t u`` inside every ball, per direction ``u``."""
    t = np.full(len(dirs), np.inf)
    for c in centers:
        w = origin - c
        if K.is_euclidean:
            b = dirs @ w
            disc = b * b - (w @ w) + r * r
            ti = -b + np.sqrt(np.maximum(disc, 0.0))
        else:
            gw = gauge(K, w)
            hi = (r + gw) / gauge(K, dirs)
            lo = np.zeros(len(dirs))
            for _ in range(64):
                mid = 0.5 * (lo + hi)
                ok = gauge(K, w + mid[:, None] * dirs) <= r
                lo = np.where(ok, mid, lo)
                hi = np.where(ok, hi, mid)
            ti = lo
        t = np.minimum(t, np.maximum(ti, 0.0))
    return t


def _max_gauge_to(K: NormBody, y: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.empty(len(y))
    step = max(1, _CHUNK // max(1, len(pts)))
    for s in range(0, len(y), step):
        block = y[s:s + step]
        out[s:s + step] = np.max(gauge(K, block[:, None, :] - pts[None, :, :]), axis=1)
    return out
