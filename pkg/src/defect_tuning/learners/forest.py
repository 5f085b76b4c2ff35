from __future__ import annotations

import numpy as np

from ..dataset import N_ATTRIBUTES, Release
from .params import Config, n_features_for
from .trees import Tree, fit_tree


def fit_forest(config: Config, data: Release, rng: np.random.Generator) -> list[Tree]:
    """Bagged variance-split trees with per-split attribute sampling.

    Each member tree is grown on a bootstrap sample of the rows; every split
    considers ceil(max_feature * 20) randomly chosen attributes (all of
    them when ``max_feature`` is None).
    """
    v = config.values
    n = len(data)
    n_try = n_features_for(v["max_feature"], N_ATTRIBUTES)
    trees = []
    for _ in range(v["n_estimators"]):
        rows = rng.integers(0, n, size=n)
        trees.append(fit_tree(data.X, data.counts, data.labels, rows,
                              min_split=v["min_sample_split"], min_leaf=v["min_samples_leaf"],
                              max_leaves=v["max_leaf_nodes"], n_try=n_try, rng=rng))
    return trees


def forest_value(trees: list[Tree], X: np.ndarray) -> np.ndarray:
    return np.mean([t.predict_value(X) for t in trees], axis=0)
