"""The four defect learners behind one train/predict surface.

Every model produces a numeric score o in [0, 1] per instance (leaf
defective fraction, mean over forest members, or the logistic g) and
predicts "defective" when ``o >= threshold``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..dataset import ATTRIBUTES, Instance, Release
from .forest import fit_forest, forest_value
from .logistic import LogisticModel, fit_logistic
from .params import (Config, Kind, Learner, ParamSpec, default_config, make_config,
                     n_features_for, param_space)
from .trees import Tree, cart_split_score, fit_cart
from .where import WhereModel, fit_where, where_cluster_tree, where_decision_tree

LR_THRESHOLD = 0.5

Structure = Union[Tree, list, WhereModel, LogisticModel]


@dataclass(frozen=True)
class Model:
    learner: Learner
    config: Config
    structure: Structure
    threshold: float
    seed: int

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.learner is Learner.RANDOM_FOREST:
            return forest_value(self.structure, X)
        return self.structure.predict_value(X)

    def predict_many(self, X: np.ndarray) -> np.ndarray:
        return self.predict_value(X) >= self.threshold

    def features_used(self) -> set[str]:
        if self.learner is Learner.RANDOM_FOREST:
            return set().union(*(t.features_used() for t in self.structure))
        return self.structure.features_used()

    def to_dict(self) -> dict:
        if self.learner is Learner.RANDOM_FOREST:
            body = {"trees": [t.to_dict() for t in self.structure]}
        else:
            body = self.structure.to_dict()
        return {"learner": self.learner.value, "config": dict(self.config.values),
                "threshold": self.threshold, "seed": self.seed, "model": body}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def train(config: Config, data: Release, seed: int = 0) -> Model:
    """Fit ``config``'s learner on ``data``.  Identical inputs give identical models."""
    if len(data) == 0:
        raise ValueError("cannot train on empty data")
    rng = np.random.default_rng(seed)
    learner = config.learner
    if learner is Learner.CART:
        structure = fit_cart(config, data, rng)
    elif learner is Learner.RANDOM_FOREST:
        structure = fit_forest(config, data, rng)
    elif learner is Learner.WHERE:
        structure = fit_where(config, data, rng)
    else:
        structure = fit_logistic(data)
    threshold = config.values.get("threshold", LR_THRESHOLD)
    return Model(learner, config, structure, float(threshold), int(seed))


def predict(model: Model, instance: Instance) -> bool:
    return bool(model.predict_many(np.array([instance.values]))[0])


def features_used(model: Model) -> set[str]:
    return model.features_used()


__all__ = [
    "ATTRIBUTES", "Config", "Kind", "Learner", "Model", "ParamSpec", "Tree",
    "cart_split_score", "default_config", "features_used", "make_config", "n_features_for",
    "param_space", "predict", "train", "where_cluster_tree", "where_decision_tree",
]
