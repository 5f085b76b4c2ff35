"""Tunable parameter spaces and concrete configurations for each learner."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping


class Learner(str, enum.Enum):
    WHERE = "where"
    CART = "cart"
    RANDOM_FOREST = "rf"
    LOGISTIC_REGRESSION = "lr"

    @classmethod
    def parse(cls, text: str | Learner) -> Learner:
        if isinstance(text, Learner):
            return text
        key = text.strip().lower()
        aliases = {"random_forest": "rf", "randomforest": "rf", "forest": "rf",
                   "logistic_regression": "lr", "logistic": "lr"}
        return cls(aliases.get(key, key))


class Kind(str, enum.Enum):
    CONTINUOUS = "continuous"
    INTEGER = "integer"
    BOOLEAN = "boolean"


@dataclass(frozen=True)
class ParamSpec:
    """One tunable parameter.

    A ``default`` of None means "unbounded" (``max_depth``,
    ``max_leaf_nodes``) or "all attributes" (``max_feature``); such
    parameters take the value of ``high`` when they enter arithmetic.
    """

    name: str
    kind: Kind
    low: float | None = None
    high: float | None = None
    default: Any = None

    def __post_init__(self):
        if self.kind is not Kind.BOOLEAN:
            if self.low is None or self.high is None or self.low > self.high:
                raise ValueError(f"{self.name}: bad bounds [{self.low}, {self.high}]")
            if self.default is not None and not self.low <= self.default <= self.high:
                raise ValueError(f"{self.name}: default {self.default} outside bounds")

    @property
    def numeric(self) -> bool:
        return self.kind is not Kind.BOOLEAN

    def effective(self, value):
        """Numeric stand-in for a value, mapping None to the upper bound."""
        return self.high if value is None else value

    def contains(self, value) -> bool:
        if self.kind is Kind.BOOLEAN:
            return isinstance(value, bool)
        if value is None:
            return self.default is None
        if isinstance(value, bool):
            return False
        if self.kind is Kind.INTEGER and (not float(value).is_integer()):
            return False
        return self.low <= value <= self.high


C, I, B = Kind.CONTINUOUS, Kind.INTEGER, Kind.BOOLEAN

_SPACES: dict[Learner, tuple[ParamSpec, ...]] = {
    Learner.WHERE: (
        ParamSpec("threshold", C, 0.01, 1.0, 0.5),
        ParamSpec("infoPrune", C, 0.01, 1.0, 0.33),
        ParamSpec("min_sample_split", I, 1, 10, 4),
        ParamSpec("min_Size", C, 0.01, 1.0, 0.5),
        ParamSpec("wriggle", C, 0.01, 1.0, 0.2),
        ParamSpec("depthMin", I, 1, 6, 2),
        ParamSpec("depthMax", I, 1, 20, 10),
        ParamSpec("wherePrune", B, default=False),
        ParamSpec("treePrune", B, default=True),
    ),
    Learner.CART: (
        ParamSpec("threshold", C, 0.0, 1.0, 0.5),
        ParamSpec("max_feature", C, 0.01, 1.0, None),
        ParamSpec("min_sample_split", I, 2, 20, 2),
        ParamSpec("min_samples_leaf", I, 1, 20, 1),
        ParamSpec("max_depth", I, 1, 50, None),
    ),
    Learner.RANDOM_FOREST: (
        ParamSpec("threshold", C, 0.01, 1.0, 0.5),
        ParamSpec("max_feature", C, 0.01, 1.0, None),
        ParamSpec("max_leaf_nodes", I, 1, 50, None),
        ParamSpec("min_sample_split", I, 2, 20, 2),
        ParamSpec("min_samples_leaf", I, 1, 20, 1),
        ParamSpec("n_estimators", I, 50, 150, 100),
    ),
    Learner.LOGISTIC_REGRESSION: (),
}


def param_space(learner: Learner | str) -> list[ParamSpec]:
    return list(_SPACES[Learner.parse(learner)])


@dataclass(frozen=True)
class Config:
    learner: Learner
    values: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "learner", Learner.parse(self.learner))
        object.__setattr__(self, "values", dict(self.values))
        validate(self)

    def __getitem__(self, name: str):
        return self.values[name]

    def key(self) -> tuple:
        """Hashable identity, used to cache scores of repeated configurations."""
        return (self.learner.value, *sorted(self.values.items()))

    def to_dict(self) -> dict[str, Any]:
        return {"learner": self.learner.value, "values": dict(self.values)}


def validate(config: Config) -> None:
    specs = {s.name: s for s in _SPACES[config.learner]}
    unknown = set(config.values) - set(specs)
    missing = set(specs) - set(config.values)
    if unknown or missing:
        raise ValueError(f"{config.learner.value}: unknown {sorted(unknown)}, missing {sorted(missing)}")
    for name, value in config.values.items():
        if not specs[name].contains(value):
            raise ValueError(f"{config.learner.value}.{name}={value!r} outside {specs[name]}")


def default_config(learner: Learner | str) -> Config:
    learner = Learner.parse(learner)
    return Config(learner, {s.name: s.default for s in _SPACES[learner]})


def make_config(learner: Learner | str, **overrides) -> Config:
    """The default configuration with some parameters replaced."""
    learner = Learner.parse(learner)
    values = {s.name: s.default for s in _SPACES[learner]}
    values.update(overrides)
    return Config(learner, values)


def n_features_for(fraction: float | None, n_total: int) -> int:
    """Attributes implied by a ``max_feature``/``infoPrune`` fraction: ceil(r * n)."""
    if fraction is None:
        return n_total
    # round first so that e.g. 0.15 * 20 does not ceil to 4
    return max(1, min(n_total, math.ceil(round(fraction * n_total, 9))))
