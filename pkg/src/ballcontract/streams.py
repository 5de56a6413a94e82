"""Reproducible random streams built on the Philox counter-based generator.

Every random quantity in the package is drawn from a stream identified by a
master seed plus a tuple of integer or string labels.  Monte Carlo sampling is
split into fixed-size shards; shard ``j`` of a stream always starts at counter
block ``j << 192``, so the draws of a shard do not depend on how many workers
process the shards or in which order.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

SHARD_SIZE = 1 << 16
_MASK64 = (1 << 64) - 1

T = TypeVar("T")


def _label_int(label: int | str) -> int:
    if isinstance(label, str):
        return zlib.crc32(label.encode("utf-8"))
    return int(label) & _MASK64


def _key(seed: int, labels: Sequence[int | str]) -> int:
    entropy = [int(seed) & _MASK64] + [_label_int(lab) for lab in labels]
    state = np.random.SeedSequence(entropy).generate_state(2, dtype=np.uint64)
    return int(state[0]) << 64 | int(state[1])


def derive_seed(seed: int, *labels: int | str) -> int:
    """Derive a 64-bit child seed from ``seed`` and a path of labels."""
    return _key(seed, labels) & _MASK64


def generator(seed: int, *labels: int | str, shard: int = 0) -> np.random.Generator:
    """Return the Philox generator for ``(seed, labels)`` positioned at ``shard``."""
    bitgen = np.random.Philox(key=_key(seed, labels), counter=int(shard) << 192)
    return np.random.Generator(bitgen)


def shard_sizes(samples: int, shard_size: int = SHARD_SIZE) -> list[int]:
    full, rest = divmod(int(samples), shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def map_shards(fn: Callable[[int, int], T], samples: int, jobs: int = 1,
               shard_size: int = SHARD_SIZE) -> list[T]:
    """Evaluate ``fn(shard_index, shard_samples)`` over all shards, in shard order."""
    sizes = shard_sizes(samples, shard_size)
    if jobs <= 1 or len(sizes) <= 1:
        return [fn(j, n) for j, n in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(len(sizes)), sizes))


def unit_directions(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform random unit vectors, by normalizing standard normal draws."""
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1)
    # a zero draw has probability zero; redraw defensively anyway
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def ordered_map(fn: Callable[[T], object], items: Iterable[T], jobs: int = 1) -> list:
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
