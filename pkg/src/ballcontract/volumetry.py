"""Volumes and quermassintegrals of ball regions.

Four routes are available:

* :func:`mc_volume` -- rejection sampling in the bounding box with an exact
  (Clopper-Pearson) binomial interval;
* :func:`exact_area_2d` -- exact polygon arithmetic for planar polytopal norms;
* :func:`grid_bounds` -- a deterministic lower/upper sandwich;
* :func:`quermass_kubota` and :func:`mean_width_hull` -- quermassintegrals of
  Euclidean ball unions through projection averages.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import polygons, streams
from .ball_bodies import BallRegion, is_empty, molecule
from .estimates import QuermassEstimate, VolumeEstimate, clopper_pearson, normal_quantile
from .norms import gauge, omega

MAX_GRID_CELLS = 10**8


def mc_hit_volume(classify: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray | None]],
                  lo, hi, samples: int, seed: int, confidence: float = 0.99,
                  jobs: int = 1, labels: tuple = ()) -> VolumeEstimate:
    """Monte Carlo volume of a set given a batch membership classifier on a box.

    ``classify(y)`` returns ``(inside, uncertain)`` boolean arrays; uncertain
    points count as half hits and widen the interval by their full share.
    Shard ``j`` always draws from counter block ``j`` of the ``(seed, labels)``
    stream, so the estimate is identical for every ``jobs`` value.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    width = hi - lo
    if np.any(width <= 0):
        raise ValueError("degenerate bounding box")
    box = float(np.prod(width))

    def shard(j: int, n: int) -> tuple[int, int]:
        rng = streams.generator(seed, *labels, shard=j)
        y = lo + width * rng.random((n, len(lo)))
        inside, uncertain = classify(y)
        unc = 0 if uncertain is None else int(np.count_nonzero(uncertain & ~inside))
        return int(np.count_nonzero(inside)), unc

    counts = streams.map_shards(shard, samples, jobs=jobs)
    hits = sum(c[0] for c in counts)
    unsure = sum(c[1] for c in counts)
    p_lo, _ = clopper_pearson(hits, samples, confidence)
    _, p_hi = clopper_pearson(hits + unsure, samples, confidence)
    value = box * (hits + 0.5 * unsure) / samples
    return VolumeEstimate(
        value=value, lo=min(box * p_lo, value), hi=max(box * p_hi, value),
        method="monte-carlo", samples=int(samples), seed=int(seed),
        confidence=float(confidence), bias=box * unsure / samples,
    )


def mc_volume(region: BallRegion, samples: int, seed: int, confidence: float = 0.99,
              jobs: int = 1) -> VolumeEstimate:
    """Monte Carlo volume of a ball region with a binomial confidence interval."""
    if samples < 1:
        raise ValueError("need at least one sample")
    if is_empty(region):
        return VolumeEstimate.exact(0.0, note="empty")
    if region.unbounded:
        raise ValueError("r-ball hull is the whole space; its volume is infinite")
    lo, hi = region.bounding_box()
    if region.kind != "molecule" and np.any(hi - lo <= 0):
        return VolumeEstimate.exact(0.0, note="degenerate")
    return mc_hit_volume(region.classify, lo, hi, samples, seed, confidence, jobs,
                         labels=("mc-volume", region.kind))


def exact_area_2d(region: BallRegion) -> VolumeEstimate:
    """Exact area of a planar region under a polytopal norm."""
    K = region.norm
    if region.dim != 2:
        raise ValueError("exact_area_2d needs a planar region")
    if not K.is_polytope:
        raise ValueError(f"exact_area_2d needs a polytopal norm, not {K.kind}")
    if region.kind == "molecule":
        polys = [c + region.radius * K.polygon for c in region.centers]
        return VolumeEstimate.exact(polygons.union_area(polys))
    if is_empty(region):
        return VolumeEstimate.exact(0.0, note="empty")
    if region.unbounded:
        raise ValueError("r-ball hull is the whole plane; its area is infinite")
    return VolumeEstimate.exact(max(0.0, polygons.area(region.polygon)))


def grid_bounds(region: BallRegion, resolution: int) -> tuple[float, float]:
    """Deterministic bounds ``lower <= volume <= upper`` from a cell classification.

    Over a cell with center ``m`` the reach function varies by at most the
    largest gauge of a corner offset, so cells are classified as inside,
    outside or boundary without sampling.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    d = region.dim
    if resolution ** d > MAX_GRID_CELLS:
        raise ValueError(f"grid of {resolution}^{d} cells exceeds {MAX_GRID_CELLS}")
    if is_empty(region):
        return 0.0, 0.0
    lo, hi = region.bounding_box()
    if np.any(hi - lo <= 0):
        return 0.0, 0.0
    step = (hi - lo) / resolution
    cell = float(np.prod(step))
    corners = np.array(np.meshgrid(*[[-0.5, 0.5]] * d, indexing="ij")).reshape(d, -1).T
    spread = float(np.max(gauge(region.norm, corners * step)))
    r = region.radius
    inside = boundary = 0
    axes = [lo[k] + step[k] * (np.arange(resolution) + 0.5) for k in range(d)]
    # chunk along the first axis
    rows_per_chunk = max(1, (1 << 18) // resolution ** (d - 1))
    for s in range(0, resolution, rows_per_chunk):
        sub = [axes[0][s:s + rows_per_chunk]] + axes[1:]
        mids = np.array(np.meshgrid(*sub, indexing="ij")).reshape(d, -1).T
        f = np.atleast_1d(region.reach(mids))
        surely_in = f + spread <= r
        surely_out = f - spread > r
        inside += int(np.count_nonzero(surely_in))
        boundary += int(np.count_nonzero(~surely_in & ~surely_out))
    return inside * cell, (inside + boundary) * cell


def _union_length(centers_1d: np.ndarray, r: float) -> float:
    iv = np.sort(np.asarray(centers_1d).ravel())
    total, reach = 0.0, -math.inf
    for c in iv:
        a, b = c - r, c + r
        if b > reach:
            total += b - max(a, reach)
            reach = b
    return total


def _perp_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane orthogonal to unit vector ``u``."""
    d = len(u)
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(d)]))
    return q[:, 1:d].T


def quermass_kubota(region: BallRegion, k: int, direction_samples: int = 256,
                    vol_samples: int = 20_000, seed: int = 0,
                    confidence: float = 0.99) -> QuermassEstimate:
    """Quermassintegral ``W_k`` of a Euclidean ball union by Kubota's recursion.

    ``W_0`` is the volume and ``W_d = omega_d``.  For ``0 < k < d``,
    ``W_k(A) = (omega_d / omega_{d-1}) E_u[W_{k-1}(proj_{u-perp} A)]`` with
    ``u`` uniform on the sphere; the projection of a union of radius-``r``
    balls is the union of radius-``r`` balls around the projected centers.
    One-dimensional volumes are exact; the interval adds the direction
    sampling variance to the propagated inner variances, which is a heuristic
    for nested estimates.
    """
    K = region.norm
    if not K.is_euclidean:
        raise ValueError("quermass_kubota needs the Euclidean norm")
    if region.kind != "molecule":
        raise ValueError("quermass_kubota applies to ball unions")
    d = region.dim
    if not 0 <= k <= d:
        raise ValueError(f"k must lie in [0, {d}]")
    value, var = _kubota(region.centers, region.radius, k, direction_samples,
                         vol_samples, seed, confidence, ())
    value, var = float(value), float(var)
    z = normal_quantile(confidence)
    half = z * math.sqrt(var)
    return QuermassEstimate(
        k=k, dim=d, value=value, lo=value - half, hi=value + half,
        direction_samples=direction_samples if 0 < k < d else 0, seed=seed,
        confidence=confidence, heuristic=0 < k < d,
    )


def _kubota(centers: np.ndarray, r: float, k: int, n_dir: int, n_vol: int, seed: int,
            confidence: float, path: tuple) -> tuple[float, float]:
    """Return ``(estimate, variance)`` of ``W_k`` of the union in ``centers.shape[1]`` dims."""
    d = centers.shape[1]
    if k == d:
        return omega(d), 0.0
    if k == 0:
        if d == 1:
            return _union_length(centers[:, 0], r), 0.0
        from .norms import NormBody

        est = mc_volume(molecule(centers, r, NormBody.euclidean(d)), n_vol,
                        streams.derive_seed(seed, "kubota-vol", *path), confidence)
        se = (est.hi - est.lo) / (2 * normal_quantile(confidence))
        return est.value, se * se
    if len(centers) == 1:
        # every projection of a single ball is the same lower-dimensional ball
        inner, inner_var = _kubota(np.zeros((1, d - 1)), r, k - 1, n_dir, n_vol, seed,
                                   confidence, path + (0,))
        factor = omega(d) / omega(d - 1)
        return factor * inner, factor * factor * inner_var
    rng = streams.generator(seed, "kubota-dir", *path)
    dirs = streams.unit_directions(rng, n_dir, d)
    inner_var = 0.0
    if d == 2:
        # projections are interval unions on the lines u-perp: 2r + sum of capped gaps
        lines = np.column_stack([-dirs[:, 1], dirs[:, 0]])
        s = np.sort(centers @ lines.T, axis=0)
        vals = 2 * r + np.minimum(np.diff(s, axis=0), 2 * r).sum(axis=0)
    else:
        vals = np.empty(n_dir)
        for j, u in enumerate(dirs):
            proj = centers @ _perp_basis(u).T
            vals[j], v = _kubota(proj, r, k - 1, n_dir, n_vol, seed, confidence, path + (j,))
            inner_var += v
    factor = omega(d) / omega(d - 1)
    mean = float(vals.mean())
    dir_var = float(vals.var(ddof=1)) / n_dir if n_dir > 1 else 0.0
    return factor * mean, factor * factor * (dir_var + inner_var / n_dir ** 2)


def mean_width_hull(centers, r: float, direction_samples: int = 4096, seed: int = 0,
                    confidence: float = 0.99) -> QuermassEstimate:
    """``W_{d-1}`` of the convex hull of a Euclidean ball union, via its mean width.

    The hull has support function ``h(u) = max_i c_i . u + r``; the mean width
    is the average of ``h(u) + h(-u)`` over uniform directions and
    ``W_{d-1} = (omega_d / 2) * mean width``.  ``r = 0`` gives the hull of the
    centers.
    """
    c = np.atleast_2d(np.asarray(centers, dtype=float))
    d = c.shape[1]
    if r < 0:
        raise ValueError("radius must be nonnegative")
    rng = streams.generator(seed, "mean-width")
    dirs = streams.unit_directions(rng, direction_samples, d)
    proj = dirs @ c.T
    widths = proj.max(axis=1) - proj.min(axis=1) + 2 * r
    factor = omega(d) / 2
    value = factor * float(widths.mean())
    se = factor * float(widths.std(ddof=1)) / math.sqrt(direction_samples) if direction_samples > 1 else 0.0
    half = normal_quantile(confidence) * se
    return QuermassEstimate(k=d - 1, dim=d, value=value, lo=value - half, hi=value + half,
                            direction_samples=direction_samples, seed=seed,
                            confidence=confidence)
