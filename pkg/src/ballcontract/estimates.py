"""Estimate containers shared by the norm, volume and verification layers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from scipy import stats

METHODS = ("exact", "monte-carlo", "grid-bound")


@dataclass(frozen=True)
class VolumeEstimate:
    """A volume in Lebesgue units together with its uncertainty.

    ``lo <= value <= hi`` always holds; exact values have ``lo == value == hi``.
    ``bias`` is the width added to the interval for sample points whose
    membership could not be decided (counted as half hits).
    """

    value: float
    lo: float
    hi: float
    method: str = "exact"
    samples: int = 0
    seed: int | None = None
    confidence: float = 1.0
    bias: float = 0.0
    note: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown estimate method {self.method!r}")
        if self.value < 0:
            raise ValueError("volume estimates are nonnegative")
        if not (self.lo <= self.value <= self.hi):
            raise ValueError(f"interval [{self.lo}, {self.hi}] does not contain {self.value}")

    @classmethod
    def exact(cls, value: float, note: str = "") -> "VolumeEstimate":
        value = float(value)
        return cls(value, value, value, "exact", note=note)

    @property
    def is_exact(self) -> bool:
        return self.method == "exact"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuermassEstimate:
    """Estimate of the quermassintegral ``W_k`` of a set in dimension ``dim``."""

    k: int
    dim: int
    value: float
    lo: float
    hi: float
    direction_samples: int = 0
    seed: int | None = None
    confidence: float = 1.0
    heuristic: bool = False
    note: str = ""

    def __post_init__(self):
        if not (0 <= self.k <= self.dim):
            raise ValueError("quermassintegral index out of range")
        if not (self.lo <= self.value <= self.hi):
            raise ValueError(f"interval [{self.lo}, {self.hi}] does not contain {self.value}")

    def to_dict(self) -> dict:
        return asdict(self)


def clopper_pearson(hits: int, n: int, confidence: float) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval for a hit proportion."""
    if n <= 0:
        raise ValueError("need at least one trial")
    if not 0 <= hits <= n:
        raise ValueError("hits must lie in [0, n]")
    alpha = 1.0 - confidence
    lo = 0.0 if hits == 0 else float(stats.beta.ppf(alpha / 2, hits, n - hits + 1))
    hi = 1.0 if hits == n else float(stats.beta.ppf(1 - alpha / 2, hits + 1, n - hits))
    return lo, hi


def normal_quantile(confidence: float) -> float:
    return float(stats.norm.ppf(0.5 + confidence / 2))
