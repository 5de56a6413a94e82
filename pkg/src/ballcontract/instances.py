"""Generation and JSON serialization of uniform-contraction instances.

An instance is a pair ``(P, Q)`` of ``N``-point sets with a separating value
``lam``: every pair of ``P`` is at gauge distance at least ``lam`` and every
pair of ``Q`` at most ``lam``.  It also fixes a radius ``r`` chosen inside one
of three regimes relative to ``lam`` and the circumradius of ``P``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import streams
from .bounds import nth_root
from .configurations import (ContractionCertificate, certify_uniform_contraction,
                             circumradius, extreme_pair, min_separation, pairwise_gauges)
from .norms import NormBody, from_descriptor, gauge, support

FORMAT_VERSION = "1"
REGIMES = ("sub-lambda", "mid", "super")
STRATEGIES = ("lattice", "dart")
SUB_LAMBDA_FACTOR = 0.4
SUPER_FACTOR = 1.25
DART_ATTEMPTS_PER_POINT = 200
DART_MAX_DOUBLINGS = 10
# clustered points are drawn from a slightly shrunk ball so that rounding
# never pushes a pairwise distance above lam
_CLUSTER_SHRINK = 1.0 - 1e-12


class CertificationError(ValueError):
    """A point set violates the separation it claims; ``pair`` is 1-based."""

    def __init__(self, message: str, side: str | None = None,
                 pair: tuple[int, int] | None = None):
        self.side = side
        self.pair = pair
        super().__init__(message)

    @classmethod
    def from_certificate(cls, cert: ContractionCertificate) -> "CertificationError":
        side, pair, _ = cert.violation
        return cls(cert.describe(), side, pair)


def _require_separation(pts: np.ndarray, lam: float, K: NormBody, side: str) -> None:
    pair, value = extreme_pair(pairwise_gauges(pts, K), largest=(side == "Q"))
    bad = value > lam if side == "Q" else value < lam
    if bad:
        raise CertificationError(
            f"{side}-side pair {pair} has distance {value!r} against lambda = {lam!r}", side, pair)


def lattice_step(K: NormBody, lam: float) -> float:
    """Spacing ``lam / g`` where ``g`` is the smallest gauge of a nonzero integer vector in ``[-2, 2]^d``."""
    window = np.array([z for z in itertools.product(range(-2, 3), repeat=K.dim) if any(z)],
                      dtype=float)
    return lam / float(np.min(gauge(K, window)))


def gen_packed(d: int, N: int, lam: float, K: NormBody, strategy: str = "lattice",
               seed: int = 0) -> np.ndarray:
    """``N`` points with pairwise gauge distances at least ``lam``.

    ``lattice`` takes the first ``N`` points (lexicographically) of an
    ``m^d`` cube of the scaled integer lattice, ``m = ceil(N^{1/d})``;
    ``dart`` throws uniform darts into a box and keeps those at distance
    ``>= lam`` from all earlier ones, doubling the box after too many
    rejections.  The result is always re-certified; the lattice spacing is
    widened if the window heuristic ever underestimates it.
    """
    _check_common(d, N, lam, K)
    if strategy == "lattice":
        m = math.ceil(nth_root(N, d) - 1e-12)
        idx = np.array(list(itertools.islice(itertools.product(range(m), repeat=d), N)),
                       dtype=float)
        step = lattice_step(K, lam)
        pts = idx * step
        scale = 1.0
        while (sep := min_separation(pts * scale, K)) < lam:
            # rounding can leave the rescaled lattice an ulp short of lam
            scale = np.nextafter(scale * lam / sep, np.inf)
        pts = pts * scale
    elif strategy == "dart":
        pts = _dart(d, N, lam, K, seed)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    _require_separation(pts, lam, K, "P")
    return pts


def _dart(d: int, N: int, lam: float, K: NormBody, seed: int) -> np.ndarray:
    rng = streams.generator(seed, "dart", N)
    side = 2.0 * nth_root(N, d) * lam * support(K, np.eye(d)[0])
    for _ in range(DART_MAX_DOUBLINGS + 1):
        pts: list[np.ndarray] = []
        for _ in range(DART_ATTEMPTS_PER_POINT * N):
            y = side * rng.random(d)
            if not pts or np.min(gauge(K, np.asarray(pts) - y)) >= lam:
                pts.append(y)
                if len(pts) == N:
                    return np.asarray(pts)
        side *= 2.0
    raise RuntimeError(f"dart throwing placed fewer than {N} points after {DART_MAX_DOUBLINGS} doublings")


def gen_clustered(d: int, N: int, lam: float, K: NormBody, seed: int = 0) -> np.ndarray:
    """``N`` points uniform in ``(lam/2) K`` around a random anchor, so their diameter is at most ``lam``."""
    _check_common(d, N, lam, K)
    rng = streams.generator(seed, "cluster", N)
    anchor = rng.uniform(-lam, lam, size=d)
    half = np.array([support(K, e) for e in np.eye(d)])
    radius = 0.5 * lam * _CLUSTER_SHRINK
    pts = np.empty((0, d))
    while len(pts) < N:
        y = radius * half * rng.uniform(-1.0, 1.0, size=(4 * N, d))
        pts = np.vstack([pts, y[gauge(K, y) <= radius]])
    pts = anchor + pts[:N]
    _require_separation(pts, lam, K, "Q")
    return pts


def _check_common(d: int, N: int, lam: float, K: NormBody) -> None:
    if K.dim != d:
        raise ValueError(f"norm has dimension {K.dim}, expected {d}")
    if N < 2:
        raise ValueError("need N >= 2")
    if not lam > 0:
        raise ValueError("separating value must be positive")


def regime_of(r: float, lam: float, cr: float) -> str:
    if r < lam / 2:
        return "sub-lambda"
    if r <= cr:
        return "mid"
    return "super"


def regime_radius(regime: str, lam: float, cr: float, sub_factor: float = SUB_LAMBDA_FACTOR,
                  super_factor: float = SUPER_FACTOR) -> float:
    """The representative radius of a regime."""
    if regime == "sub-lambda":
        return sub_factor * lam
    if regime == "mid":
        if cr < lam / 2:
            raise ValueError(f"mid regime needs cr >= lam/2, got cr = {cr}")
        return max(lam / 2, (lam / 2 + cr) / 2)
    if regime == "super":
        return super_factor * cr + lam
    raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")


@dataclass(eq=False)
class UniformContractionInstance:
    norm: NormBody
    lam: float
    r: float
    P: np.ndarray
    Q: np.ndarray
    regime: str
    seed: int
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.P = np.atleast_2d(np.asarray(self.P, dtype=float))
        self.Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if self.P.shape != self.Q.shape:
            raise ValueError(f"P and Q have shapes {self.P.shape} and {self.Q.shape}")
        if self.P.shape[1] != self.norm.dim:
            raise ValueError("point dimension does not match the norm")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if not self.r > 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return self.norm.dim

    @property
    def N(self) -> int:
        return len(self.P)

    @cached_property
    def cr(self) -> float:
        """Circumradius of ``P``."""
        return circumradius(self.P, self.norm).radius

    def certificate(self) -> ContractionCertificate:
        return certify_uniform_contraction(self.P, self.Q, self.lam, self.norm)

    def check(self) -> None:
        """Raise if the instance violates its certificate or its regime tag."""
        cert = self.certificate()
        if not cert.passed:
            raise CertificationError.from_certificate(cert)
        # the circumradius of non-polytopal norms is iterative; allow round-off at r = cr
        slack = 1e-9 * max(1.0, self.cr)
        allowed = {regime_of(self.r, self.lam, self.cr + t) for t in (-slack, 0.0, slack)}
        actual = regime_of(self.r, self.lam, self.cr)
        if self.regime not in allowed:
            raise ValueError(f"regime tag {self.regime!r} inconsistent with r = {self.r!r}, "
                             f"lam = {self.lam!r}, cr(P) = {self.cr!r} (computed {actual!r})")

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "dim": self.dim,
            "norm": self.norm.descriptor(),
            "lambda": self.lam,
            "r": self.r,
            "regime": self.regime,
            "seed": self.seed,
            "P": self.P.tolist(),
            "Q": self.Q.tolist(),
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "UniformContractionInstance":
        version = doc.get("version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported instance version {version!r}; expected {FORMAT_VERSION!r}")
        missing = [k for k in ("dim", "norm", "lambda", "r", "regime", "seed", "P", "Q") if k not in doc]
        if missing:
            raise ValueError(f"instance document lacks fields {missing}")
        K = from_descriptor(doc["norm"], int(doc["dim"]))
        inst = cls(K, float(doc["lambda"]), float(doc["r"]), doc["P"], doc["Q"],
                   doc["regime"], int(doc["seed"]), [str(n) for n in doc.get("notes", [])])
        inst.check()
        return inst


def threshold_notes(d: int, N: int) -> list[str]:
    notes = []
    if N < 2 ** d:
        notes.append(f"below 2^d threshold (N = {N} < {2 ** d})")
    if N < 3 ** d:
        notes.append(f"below 3^d threshold (N = {N} < {3 ** d})")
    return notes


def gen_instance(d: int, N: int, lam: float, K: NormBody, regime: str, seed: int,
                 strategy: str = "lattice", r: float | None = None,
                 sub_factor: float = SUB_LAMBDA_FACTOR,
                 super_factor: float = SUPER_FACTOR) -> UniformContractionInstance:
    """A certified instance with packed ``P``, clustered ``Q`` and a regime radius.

    An explicit ``r`` overrides the regime representative; the regime tag is
    then recomputed from ``r``.
    """
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    P = gen_packed(d, N, lam, K, strategy, streams.derive_seed(seed, "P"))
    Q = gen_clustered(d, N, lam, K, streams.derive_seed(seed, "Q"))
    cr = circumradius(P, K).radius
    notes = threshold_notes(d, N)
    if r is None:
        r = regime_radius(regime, lam, cr, sub_factor, super_factor)
    else:
        tagged = regime_of(r, lam, cr)
        if tagged != regime:
            notes.append(f"regime {regime!r} replaced by {tagged!r} for r = {r!r}")
        regime = tagged
    inst = UniformContractionInstance(K, float(lam), float(r), P, Q, regime, int(seed), notes)
    inst.__dict__["cr"] = cr
    inst.check()
    return inst


def save(instance: UniformContractionInstance, path) -> None:
    """Write an instance as indented JSON; floats keep all 17 significant digits."""
    Path(path).write_text(json.dumps(instance.to_dict(), indent=1) + "\n")


def load(path) -> UniformContractionInstance:
    """Read and re-certify an instance file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: instance must be a JSON object")
    return UniformContractionInstance.from_dict(doc)


def random_hexagon(seed: int) -> NormBody:
    """A random o-symmetric hexagon, given by three facet normal pairs."""
    rng = streams.generator(seed, "hexagon")
    angles = np.arange(3) * np.pi / 3 + rng.uniform(-0.3, 0.3, size=3)
    lengths = rng.uniform(0.7, 1.4, size=3)
    normals = lengths[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])
    return NormBody.polytope_h(normals, name="hexagon")


def pairwise_summary(P, K: NormBody) -> tuple[float, float]:
    """``(min, max)`` pairwise gauge distance of a point set."""
    g = pairwise_gauges(P, K)
    iu = np.triu_indices(len(g), 1)
    return float(g[iu].min()), float(g[iu].max())
