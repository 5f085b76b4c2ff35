"""Two-sample Kolmogorov-Smirnov comparison and tuned-minus-untuned deltas."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

KS_COEFFICIENT_95 = 1.36


@dataclass(frozen=True)
class SampleSeries:
    """Scores of one configuration, optionally keyed by data set."""

    label: str
    values: tuple[float, ...]
    keys: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.keys is not None:
            object.__setattr__(self, "keys", tuple(self.keys))
            if len(self.keys) != len(self.values):
                raise ValueError(f"{self.label}: {len(self.keys)} keys for {len(self.values)} values")
        if not self.values:
            raise ValueError(f"{self.label}: empty sample")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError(f"{self.label}: non-finite value")


def _values(s: SampleSeries | Sequence[float]) -> np.ndarray:
    v = np.asarray(s.values if isinstance(s, SampleSeries) else s, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample")
    return v


def ks_statistic(xs: SampleSeries | Sequence[float], ys: SampleSeries | Sequence[float]) -> float:
    """Largest absolute gap between the two empirical CDFs."""
    x = np.sort(_values(xs))
    y = np.sort(_values(ys))
    grid = np.concatenate([x, y])
    fx = np.searchsorted(x, grid, side="right") / x.size
    fy = np.searchsorted(y, grid, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def ks_threshold(n: int, m: int, coefficient: float = KS_COEFFICIENT_95) -> float:
    """Critical KS distance: coefficient * sqrt((n + m) / (n * m)); 1.36 is the 95% level."""
    if n < 1 or m < 1:
        raise ValueError("sample sizes must be positive")
    return coefficient * math.sqrt((n + m) / (n * m))


def ks_different(xs, ys) -> tuple[float, float, bool]:
    """``(statistic, threshold, different)``; different iff statistic >= threshold."""
    d = ks_statistic(xs, ys)
    t = ks_threshold(_values(xs).size, _values(ys).size)
    return d, t, d >= t


def delta_series(tuned: SampleSeries, untuned: SampleSeries) -> list[float]:
    """Element-wise tuned - untuned, sorted ascending."""
    if len(tuned.values) != len(untuned.values):
        raise ValueError(f"{tuned.label} and {untuned.label} differ in length")
    if tuned.keys is not None and untuned.keys is not None and tuned.keys != untuned.keys:
        raise ValueError(f"{tuned.label} and {untuned.label} are not aligned by data set")
    return sorted(t - u for t, u in zip(tuned.values, untuned.values))
