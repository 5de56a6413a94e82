"""Exact planar arithmetic for convex polygons: clipping, areas and unions.

Polygons are ``(m, 2)`` arrays of vertices in counter-clockwise order.  The
union area uses a vertical slab sweep: between consecutive event abscissae
(vertices and edge crossings) every polygon cuts a vertical line in one
interval whose endpoints move linearly, and the order of all endpoints is
fixed, so the covered length is linear in ``x`` and the midpoint rule is exact
on each slab.
"""

from __future__ import annotations

import numpy as np

EMPTY = np.zeros((0, 2))


def area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def clip(poly: np.ndarray, normal, offset: float) -> np.ndarray:
    """Intersect a convex polygon with the half-plane ``normal . x <= offset``."""
    if len(poly) == 0:
        return EMPTY
    s = poly @ np.asarray(normal, dtype=float) - offset
    if np.all(s <= 0):
        return poly
    if np.all(s > 0):
        return EMPTY
    out = []
    m = len(poly)
    for i in range(m):
        j = (i + 1) % m
        if s[i] <= 0:
            out.append(poly[i])
        if (s[i] <= 0) != (s[j] <= 0):
            t = s[i] / (s[i] - s[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return _drop_duplicates(np.array(out)) if out else EMPTY


def clip_all(poly: np.ndarray, normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    for a, b in zip(normals, offsets):
        poly = clip(poly, a, b)
        if len(poly) == 0:
            break
    return poly


def _drop_duplicates(poly: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    if len(poly) < 2:
        return poly
    scale = max(1.0, float(np.abs(poly).max()))
    nxt = np.roll(poly, -1, axis=0)
    keep = np.max(np.abs(poly - nxt), axis=1) > tol * scale
    if not np.any(keep):
        return poly[:1]
    return poly[keep]


def support(poly: np.ndarray, u) -> np.ndarray | float:
    """Support function of a polygon, for one direction or a batch."""
    out = np.max(np.asarray(u, dtype=float) @ poly.T, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _vertical_extent(poly: np.ndarray, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper ``y`` of a convex polygon on the vertical lines ``x = xs``.

    Lines missing the polygon give ``(+inf, -inf)``.
    """
    lo = np.full(len(xs), np.inf)
    hi = np.full(len(xs), -np.inf)
    p = poly
    q = np.roll(poly, -1, axis=0)
    for (x1, y1), (x2, y2) in zip(p, q):
        if x1 == x2:
            continue
        a, b = (x1, x2) if x1 < x2 else (x2, x1)
        inside = (xs >= a) & (xs <= b)
        if not np.any(inside):
            continue
        t = (xs[inside] - x1) / (x2 - x1)
        y = y1 + t * (y2 - y1)
        lo[inside] = np.minimum(lo[inside], y)
        hi[inside] = np.maximum(hi[inside], y)
    return lo, hi


def _segment_crossings(polys: list[np.ndarray]) -> np.ndarray:
    """Abscissae of proper crossings between edges of different polygons."""
    segs, owner = [], []
    for k, poly in enumerate(polys):
        q = np.roll(poly, -1, axis=0)
        segs.append(np.hstack([poly, q]))
        owner.append(np.full(len(poly), k))
    s = np.vstack(segs)
    own = np.concatenate(owner)
    p1, p2 = s[:, None, :2], s[:, None, 2:]
    q1, q2 = s[None, :, :2], s[None, :, 2:]
    r = p2 - p1
    d = q2 - q1
    denom = r[..., 0] * d[..., 1] - r[..., 1] * d[..., 0]
    w = q1 - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (w[..., 0] * d[..., 1] - w[..., 1] * d[..., 0]) / denom
        u = (w[..., 0] * r[..., 1] - w[..., 1] * r[..., 0]) / denom
    ok = (denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    ok &= own[:, None] < own[None, :]
    return (p1[..., 0] + np.where(ok, t, 0.0) * r[..., 0])[ok]


def union_area(polys: list[np.ndarray]) -> float:
    """Area of a union of convex polygons."""
    polys = [p for p in polys if len(p) >= 3 and area(p) > 0]
    if not polys:
        return 0.0
    if len(polys) == 1:
        return area(polys[0])
    events = np.concatenate([p[:, 0] for p in polys] + [_segment_crossings(polys)])
    events = np.unique(events)
    widths = np.diff(events)
    mids = 0.5 * (events[:-1] + events[1:])
    keep = widths > 0
    widths, mids = widths[keep], mids[keep]
    lo = np.empty((len(mids), len(polys)))
    hi = np.empty_like(lo)
    for k, poly in enumerate(polys):
        lo[:, k], hi[:, k] = _vertical_extent(poly, mids)
    order = np.argsort(lo, axis=1)
    lo = np.take_along_axis(lo, order, axis=1)
    hi = np.take_along_axis(hi, order, axis=1)
    covered = np.zeros(len(mids))
    reach = np.full(len(mids), -np.inf)
    for k in range(len(polys)):
        valid = hi[:, k] >= lo[:, k]
        start = np.maximum(lo[:, k], reach)
        covered += np.where(valid, np.maximum(0.0, hi[:, k] - start), 0.0)
        reach = np.where(valid, np.maximum(reach, hi[:, k]), reach)
    return float(np.dot(widths, covered))
