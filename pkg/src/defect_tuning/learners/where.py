"""The WHERE two-tree learner.

First a clustering tree: each node projects its rows onto the line between
two far-apart pivot rows (a random row's farthest neighbour, then that
row's farthest neighbour) and splits at the median of the projection.
Leaves of that tree are treated as classes, and a decision tree restricted
to the attributes with the highest information gain learns to predict them.
A new row is scored with the defective fraction of the decision-tree leaf
it reaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..dataset import ATTRIBUTES, N_ATTRIBUTES, Release
from . import _kernels
from .params import Config, n_features_for
from .trees import Tree, fit_tree


@dataclass
class ClusterNode:
    rows: np.ndarray
    depth: int
    east: int | None = None
    west: int | None = None
    left: ClusterNode | None = None
    right: ClusterNode | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def leaves(self) -> list[ClusterNode]:
        if self.is_leaf:
            return [self]
        return self.left.leaves() + self.right.leaves()

    def nodes(self):
        yield self
        if not self.is_leaf:
            yield from self.left.nodes()
            yield from self.right.nodes()


def min_leaf_size(size: int, min_size: float) -> int:
    """Rows below which a cluster is not split: ceil(size ** min_Size)."""
    return max(1, math.ceil(round(size ** min_size, 9)))


def _normalize(X: np.ndarray) -> np.ndarray:
    lo = X.min(axis=0)
    span = X.max(axis=0) - lo
    span[span == 0] = 1.0
    return (X - lo) / span


def project(X: np.ndarray, rng: np.random.Generator) -> tuple[np.ndarray, int, int] | None:
    """Position of each row along the east-west pivot line.

    Returns ``(positions, east, west)`` with pivots as row offsets into
    ``X``, or None when every row is identical.
    """
    Z = _normalize(X)
    anyone = int(rng.integers(len(Z)))
    east = int(np.argmax(np.linalg.norm(Z - Z[anyone], axis=1)))
    d_east = np.linalg.norm(Z - Z[east], axis=1)
    west = int(np.argmax(d_east))
    c = d_east[west]
    if c == 0:
        return None
    d_west = np.linalg.norm(Z - Z[west], axis=1)
    return (d_east ** 2 + c ** 2 - d_west ** 2) / (2 * c), east, west


def where_cluster_tree(data: Release, config: Config, rng: np.random.Generator) -> ClusterNode:
    """Recursive median split on the synthesized projection.

    Splitting stops at ``ceil(n ** min_Size)`` rows or at ``depthMax``.
    With ``wherePrune`` on, a split at depth >= ``depthMin`` is kept only
    if the defect rates of its two halves differ by more than ``wriggle``.
    """
    v = config.values
    X, labels = data.X, data.labels
    m = min_leaf_size(len(data), v["min_Size"])

    def build(rows: np.ndarray, depth: int) -> ClusterNode:
        node = ClusterNode(rows, depth)
        if len(rows) <= m or len(rows) < 2 or depth >= v["depthMax"]:
            return node
        found = project(X[rows], rng)
        if found is None:
            return node
        pos, east, west = found
        order = np.argsort(pos, kind="stable")
        half = len(rows) // 2
        lo, hi = rows[order[:half]], rows[order[half:]]
        if v["wherePrune"] and depth >= v["depthMin"]:
            if abs(labels[lo].mean() - labels[hi].mean()) <= v["wriggle"]:
                return node
        node.east, node.west = int(rows[east]), int(rows[west])
        node.left = build(lo, depth + 1)
        node.right = build(hi, depth + 1)
        return node

    return build(np.arange(len(data)), 0)


def cluster_labels(root: ClusterNode, n: int) -> np.ndarray:
    out = np.full(n, -1, dtype=np.int64)
    for k, leaf in enumerate(root.leaves()):
        out[leaf.rows] = k
    return out


def rank_attributes(X: np.ndarray, classes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Attributes ordered by the information gain of their best binary cut.

    Returns ``(order, gains)`` where ``gains`` is indexed by attribute.
    Ties keep attribute order; an attribute with no cut has gain 0.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    classes = np.asarray(classes, dtype=np.int64)
    k = int(classes.max()) + 1
    idx = np.arange(len(X), dtype=np.int64)
    dummy = np.zeros(len(X))
    parent = _kernels.impurity(dummy, classes, k, idx, 0, len(X), _kernels.ENTROPY)
    gains = np.zeros(X.shape[1])
    for f in range(X.shape[1]):
        best_f, _, sc = _kernels.best_split(X, dummy, classes, k, idx, 0, len(X),
                                            np.array([f], dtype=np.int64), _kernels.ENTROPY, 1)
        if best_f >= 0:
            gains[f] = max(0.0, parent - sc)
    return np.argsort(-gains, kind="stable"), gains


def _prune_same_majority(tree: Tree) -> Tree:
    collapse = []
    stack = [0]
    while stack:
        k = stack.pop()
        for child in (tree.left[k], tree.right[k]):
            if tree.feature[child] < 0:
                continue
            if tree.majority[child] == tree.majority[k]:
                collapse.append(child)
            else:
                stack.append(child)
    return tree.collapse(collapse) if collapse else tree


def where_decision_tree(clusters: np.ndarray, data: Release, config: Config) -> tuple[Tree, tuple[str, ...]]:
    """Decision tree predicting cluster membership from the top-ranked attributes.

    A node is split only when it holds more than ``min_sample_split`` rows.
    With ``treePrune`` on, any internal child whose majority cluster equals
    its parent's is collapsed into a leaf.
    """
    v = config.values
    clusters = np.asarray(clusters, dtype=np.int64)
    n_eligible = n_features_for(v["infoPrune"], N_ATTRIBUTES)
    order, _ = rank_attributes(data.X, clusters)
    eligible = np.sort(order[:n_eligible])
    tree = fit_tree(data.X, data.counts, data.labels, np.arange(len(data)),
                    criterion=_kernels.ENTROPY, classes=clusters,
                    min_split=v["min_sample_split"] + 1, min_leaf=1, allowed=eligible)
    if tree.majority is None:
        tree = Tree(tree.feature, tree.cut, tree.left, tree.right, tree.value, tree.n_samples,
                    np.zeros(tree.n_nodes, dtype=np.int64))
    if v["treePrune"] and tree.n_nodes > 1:
        tree = _prune_same_majority(tree)
    return tree, tuple(ATTRIBUTES[f] for f in eligible)


@dataclass(frozen=True)
class WhereModel:
    tree: Tree
    eligible: tuple[str, ...]
    cluster_sizes: tuple[int, ...] = field(default=())
    cluster_rates: tuple[float, ...] = field(default=())

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        return self.tree.predict_value(X)

    def features_used(self) -> set[str]:
        return self.tree.features_used()

    def to_dict(self) -> dict:
        return {"eligible": list(self.eligible),
                "clusters": [{"n": n, "rate": r} for n, r in zip(self.cluster_sizes, self.cluster_rates)],
                "tree": self.tree.to_dict()}


def fit_where(config: Config, data: Release, rng: np.random.Generator) -> WhereModel:
    root = where_cluster_tree(data, config, rng)
    leaves = root.leaves()
    clusters = cluster_labels(root, len(data))
    tree, eligible = where_decision_tree(clusters, data, config)
    return WhereModel(tree, eligible, tuple(len(l.rows) for l in leaves),
                      tuple(float(data.labels[l.rows].mean()) for l in leaves))
