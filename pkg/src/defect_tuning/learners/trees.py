"""Array-backed binary trees and the CART learner."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..dataset import ATTRIBUTES, N_ATTRIBUTES, Instance, Release
from . import _kernels
from .params import Config, n_features_for


@dataclass(frozen=True)
class Tree:
    """A fitted binary tree stored as parallel node arrays.

    Node 0 is the root.  ``feature`` is -1 at leaves; rows with
    ``x[feature] <= cut`` descend left.  ``value`` is the defective fraction
    of the training rows that reached the node.
    """

    feature: np.ndarray
    cut: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    majority: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature < 0))

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=int)
        for k in range(self.n_nodes):
            if self.feature[k] >= 0:
                depths[self.left[k]] = depths[self.right[k]] = depths[k] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _kernels.apply(X, self.feature, self.cut, self.left, self.right)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def features_used(self) -> set[str]:
        return {ATTRIBUTES[f] for f in self.feature if f >= 0}

    def to_dict(self) -> dict:
        nodes = []
        for k in range(self.n_nodes):
            node = {"id": k, "n": int(self.n_samples[k]), "value": float(self.value[k])}
            if self.majority is not None:
                node["majority"] = int(self.majority[k])
            if self.feature[k] >= 0:
                node.update(attribute=ATTRIBUTES[self.feature[k]], cut=float(self.cut[k]),
                            left=int(self.left[k]), right=int(self.right[k]))
            nodes.append(node)
        return {"nodes": nodes}

    def collapse(self, nodes: Sequence[int]) -> Tree:
        """Turn the given nodes into leaves and drop unreachable descendants."""
        feature = self.feature.copy()
        feature[list(nodes)] = -1
        order = []
        stack = [0]
        while stack:
            k = stack.pop()
            order.append(k)
            if feature[k] >= 0:
                stack.extend((self.right[k], self.left[k]))
        remap = {old: new for new, old in enumerate(order)}
        order = np.array(order)
        left = np.array([remap[self.left[k]] if feature[k] >= 0 else -1 for k in order], dtype=np.int64)
        right = np.array([remap[self.right[k]] if feature[k] >= 0 else -1 for k in order], dtype=np.int64)
        return Tree(feature[order], self.cut[order], left, right, self.value[order],
                    self.n_samples[order], None if self.majority is None else self.majority[order])


def fit_tree(X: np.ndarray, target: np.ndarray, labels: np.ndarray, rows: np.ndarray, *,
             criterion: int = _kernels.VARIANCE, classes: np.ndarray | None = None,
             min_split: int = 2, min_leaf: int = 1, max_depth: int | None = None,
             max_leaves: int | None = None, allowed: Sequence[int] | None = None,
             n_try: int | None = None, rng: np.random.Generator | None = None) -> Tree:
    """Grow a tree over ``rows`` (indices into ``X``; repeats allowed)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    idx = np.array(rows, dtype=np.int64)
    allowed = np.arange(N_ATTRIBUTES, dtype=np.int64) if allowed is None else np.sort(np.asarray(allowed, dtype=np.int64))
    n_try = len(allowed) if n_try is None else int(n_try)
    if n_try < len(allowed):
        keys = rng.random((2 * len(idx) + 1, X.shape[1]))
    else:
        keys = np.zeros((1, 1))
    if classes is None:
        classes = np.zeros(len(X), dtype=np.int64)
        n_classes = 1
    else:
        classes = np.asarray(classes, dtype=np.int64)
        n_classes = int(classes.max()) + 1
    feature, cut, left, right, start, end, _ = _kernels.grow(
        X, np.asarray(target, dtype=np.float64), classes, n_classes, idx, criterion,
        int(min_split), int(min_leaf), -1 if max_depth is None else int(max_depth),
        -1 if max_leaves is None else int(max_leaves), allowed, n_try, keys)
    labels = np.asarray(labels, dtype=np.float64)
    value = np.array([labels[idx[s:e]].mean() for s, e in zip(start, end)])
    n_samples = (end - start).astype(np.int64)
    majority = None
    if n_classes > 1:
        majority = np.array([np.bincount(classes[idx[s:e]], minlength=n_classes).argmax()
                             for s, e in zip(start, end)], dtype=np.int64)
    return Tree(feature, cut, left, right, value, n_samples, majority)


def cart_split_score(rows: Sequence[Instance], attribute: str, cut: float) -> float:
    """Sum over both sides of sqrt(variance of defect counts) times side fraction."""
    if len(rows) < 2:
        raise ValueError("need at least two rows to score a split")
    col = ATTRIBUTES.index(attribute)
    x = np.array([r.values[col] for r in rows])
    y = np.array([r.defect_count for r in rows], dtype=float)
    mask = x <= cut
    if mask.all() or not mask.any():
        raise ValueError(f"cut {cut} on {attribute} leaves one side empty")
    return float(sum(math.sqrt(np.var(y[m])) * m.sum() / len(y) for m in (mask, ~mask)))


def fit_cart(config: Config, data: Release, rng: np.random.Generator) -> Tree:
    v = config.values
    allowed = None
    if v["max_feature"] is not None:
        k = n_features_for(v["max_feature"], N_ATTRIBUTES)
        allowed = np.sort(rng.choice(N_ATTRIBUTES, size=k, replace=False))
    return fit_tree(data.X, data.counts, data.labels, np.arange(len(data)),
                    min_split=v["min_sample_split"], min_leaf=v["min_samples_leaf"],
                    max_depth=v["max_depth"], allowed=allowed)
