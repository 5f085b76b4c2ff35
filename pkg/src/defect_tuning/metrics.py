"""Confusion-matrix accounting and the pd/pf/prec/F goal functions.

A zero denominator scores 0 for every goal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class Goal(str, enum.Enum):
    PD = "pd"
    PF = "pf"
    PREC = "prec"
    F = "f"

    @property
    def maximize(self) -> bool:
        return self is not Goal.PF

    @classmethod
    def parse(cls, text: str | Goal) -> Goal:
        if isinstance(text, Goal):
            return text
        key = text.strip().lower()
        aliases = {"precision": "prec", "recall": "pd", "f1": "f", "fmeasure": "f"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts of a binary detector.

    ``tn``, ``fn``, ``fp``, ``tp`` are the A, B, C, D cells respectively.
    """

    tn: int
    fn: int
    fp: int
    tp: int

    def __post_init__(self):
        if min(self.tn, self.fn, self.fp, self.tp) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tn + self.fn + self.fp + self.tp


def confusion(actual: Sequence[bool], predicted: Sequence[bool]) -> ConfusionMatrix:
    actual = np.asarray(actual, dtype=bool)
    predicted = np.asarray(predicted, dtype=bool)
    if actual.shape != predicted.shape:
        raise ValueError(f"length mismatch: {actual.shape} vs {predicted.shape}")
    if actual.size == 0:
        raise ValueError("cannot score an empty prediction")
    tp = int(np.count_nonzero(actual & predicted))
    fp = int(np.count_nonzero(~actual & predicted))
    fn = int(np.count_nonzero(actual & ~predicted))
    return ConfusionMatrix(tn=actual.size - tp - fp - fn, fn=fn, fp=fp, tp=tp)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def score(goal: Goal | str, cm: ConfusionMatrix) -> float:
    goal = Goal.parse(goal)
    pd = _ratio(cm.tp, cm.fn + cm.tp)
    if goal is Goal.PD:
        return pd
    if goal is Goal.PF:
        return _ratio(cm.fp, cm.tn + cm.fp)
    prec = _ratio(cm.tp, cm.tp + cm.fp)
    if goal is Goal.PREC:
        return prec
    return _ratio(2 * pd * prec, pd + prec)


def all_scores(cm: ConfusionMatrix) -> dict[str, float]:
    return {g.value: score(g, cm) for g in Goal}


def better(goal: Goal | str, x: float, y: float) -> bool:
    """True iff ``x`` strictly improves on ``y`` under the goal's polarity."""
    return x > y if Goal.parse(goal).maximize else x < y
