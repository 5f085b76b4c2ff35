"""Compiled split search and tree growth shared by CART, RF and WHERE.

Two split criteria are supported:

* ``VARIANCE``: minimise sum_i sqrt(var_i) * n_i / n over the two sides,
  where var_i is the (population) variance of the defect counts on side i.
* ``ENTROPY``: minimise the size-weighted class entropy of the two sides.

Candidate cuts are midpoints between consecutive distinct values; rows with
``x <= cut`` go left.  Features are scanned in index order and cuts in
ascending order, and a later candidate replaces the incumbent only when it
is better by more than ``TIE_EPS``, so ties go to the lower feature index
and then the lower cut.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

VARIANCE = 0
ENTROPY = 1
TIE_EPS = 1e-12


@njit(cache=True)
def _midpoint(a, b):
    m = 0.5 * (a + b)
    if m >= b:
        m = a
    return m


@njit(cache=True)
def best_split(X, target, classes, n_classes, idx, start, end, feats, criterion, min_leaf):
    """Best (feature, cut, score) for rows ``idx[start:end]``; feature -1 if none."""
    n = end - start
    best_score = np.inf
    best_f = -1
    best_cut = 0.0
    rows = idx[start:end]
    if n < 2:
        return best_f, best_cut, best_score
    s1_tot = 0.0
    s2_tot = 0.0
    tot_counts = np.zeros(n_classes, dtype=np.int64)
    if criterion == VARIANCE:
        for j in range(n):
            y = target[rows[j]]
            s1_tot += y
            s2_tot += y * y
    else:
        for j in range(n):
            tot_counts[classes[rows[j]]] += 1
    left = np.zeros(n_classes, dtype=np.int64)
    right = np.zeros(n_classes, dtype=np.int64)
    vals = np.empty(n)
    for fi in range(feats.shape[0]):
        f = feats[fi]
        for j in range(n):
            vals[j] = X[rows[j], f]
        order = np.argsort(vals, kind="mergesort")
        if vals[order[0]] == vals[order[n - 1]]:
            continue
        if criterion == VARIANCE:
            s1 = 0.0
            s2 = 0.0
            for i in range(n - 1):
                y = target[rows[order[i]]]
                s1 += y
                s2 += y * y
                a = vals[order[i]]
                b = vals[order[i + 1]]
                if a == b:
                    continue
                nl = i + 1
                nr = n - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                vl = s2 / nl - (s1 / nl) ** 2
                vr = (s2_tot - s2) / nr - ((s1_tot - s1) / nr) ** 2
                if vl < 0.0:
                    vl = 0.0
                if vr < 0.0:
                    vr = 0.0
                sc = (math.sqrt(vl) * nl + math.sqrt(vr) * nr) / n
                if sc < best_score - TIE_EPS:
                    best_score = sc
                    best_f = f
                    best_cut = _midpoint(a, b)
        else:
            sl = 0.0
            sr = 0.0
            for k in range(n_classes):
                left[k] = 0
                right[k] = tot_counts[k]
                if right[k] > 0:
                    sr += right[k] * math.log(right[k])
            for i in range(n - 1):
                k = classes[rows[order[i]]]
                c = right[k]
                sr -= c * math.log(c)
                if c > 1:
                    sr += (c - 1) * math.log(c - 1)
                right[k] = c - 1
                c = left[k]
                if c > 0:
                    sl -= c * math.log(c)
                sl += (c + 1) * math.log(c + 1)
                left[k] = c + 1
                a = vals[order[i]]
                b = vals[order[i + 1]]
                if a == b:
                    continue
                nl = i + 1
                nr = n - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                sc = (nl * math.log(nl) - sl + nr * math.log(nr) - sr) / n
                if sc < best_score - TIE_EPS:
                    best_score = sc
                    best_f = f
                    best_cut = _midpoint(a, b)
    return best_f, best_cut, best_score


@njit(cache=True)
def impurity(target, classes, n_classes, idx, start, end, criterion):
    n = end - start
    if criterion == VARIANCE:
        s1 = 0.0
        s2 = 0.0
        for j in range(start, end):
            y = target[idx[j]]
            s1 += y
            s2 += y * y
        v = s2 / n - (s1 / n) ** 2
        return math.sqrt(v) if v > 0.0 else 0.0
    counts = np.zeros(n_classes, dtype=np.int64)
    for j in range(start, end):
        counts[classes[idx[j]]] += 1
    h = 0.0
    for k in range(n_classes):
        if counts[k] > 0:
            p = counts[k] / n
            h -= p * math.log(p)
    return h


@njit(cache=True)
def _node_features(allowed, n_try, keys, node):
    if n_try >= allowed.shape[0]:
        return allowed
    k = np.empty(allowed.shape[0])
    for j in range(allowed.shape[0]):
        k[j] = keys[node, allowed[j]]
    pick = allowed[np.argsort(k, kind="mergesort")[:n_try]]
    return np.sort(pick)


@njit(cache=True)
def grow(X, target, classes, n_classes, idx, criterion, min_split, min_leaf,
         max_depth, max_leaves, allowed, n_try, keys):
    """Grow a binary tree over the rows listed in ``idx`` (permuted in place).

    A node is split when it holds at least ``min_split`` rows, is above
    ``max_depth`` (negative: unbounded), is impure and has a legal cut.
    With ``max_leaves > 0`` nodes are expanded best-first by weighted
    impurity decrease; otherwise in creation order.  When ``n_try`` is
    smaller than ``len(allowed)``, node ``k`` considers the ``n_try``
    allowed features with the smallest ``keys[k, f]``.
    """
    n = idx.shape[0]
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int64)
    cut = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    start = np.zeros(cap, dtype=np.int64)
    end = np.zeros(cap, dtype=np.int64)
    depth = np.zeros(cap, dtype=np.int64)
    cand_f = np.full(cap, -1, dtype=np.int64)
    cand_cut = np.zeros(cap)
    cand_gain = np.zeros(cap)
    buf = np.empty(n, dtype=idx.dtype)

    end[0] = n
    n_nodes = 1
    n_leaves = 1
    _evaluate(X, target, classes, n_classes, idx, criterion, min_split, min_leaf, max_depth,
              allowed, n_try, keys, 0, start, end, depth, cand_f, cand_cut, cand_gain)
    fifo = 0
    while True:
        if max_leaves > 0 and n_leaves >= max_leaves:
            break
        pick = -1
        if max_leaves > 0:
            best = -np.inf
            for k in range(n_nodes):
                if cand_f[k] >= 0 and cand_gain[k] > best:
                    best = cand_gain[k]
                    pick = k
        else:
            while fifo < n_nodes and cand_f[fifo] < 0:
                fifo += 1
            if fifo < n_nodes:
                pick = fifo
        if pick < 0:
            break
        f = cand_f[pick]
        c = cand_cut[pick]
        s = start[pick]
        e = end[pick]
        nl = 0
        for j in range(s, e):
            if X[idx[j], f] <= c:
                buf[nl] = idx[j]
                nl += 1
        m = nl
        for j in range(s, e):
            if X[idx[j], f] > c:
                buf[m] = idx[j]
                m += 1
        for j in range(e - s):
            idx[s + j] = buf[j]
        lnode = n_nodes
        rnode = n_nodes + 1
        n_nodes += 2
        n_leaves += 1
        feature[pick] = f
        cut[pick] = c
        left[pick] = lnode
        right[pick] = rnode
        cand_f[pick] = -1
        start[lnode] = s
        end[lnode] = s + nl
        start[rnode] = s + nl
        end[rnode] = e
        depth[lnode] = depth[pick] + 1
        depth[rnode] = depth[pick] + 1
        _evaluate(X, target, classes, n_classes, idx, criterion, min_split, min_leaf, max_depth,
                  allowed, n_try, keys, lnode, start, end, depth, cand_f, cand_cut, cand_gain)
        _evaluate(X, target, classes, n_classes, idx, criterion, min_split, min_leaf, max_depth,
                  allowed, n_try, keys, rnode, start, end, depth, cand_f, cand_cut, cand_gain)
    return (feature[:n_nodes], cut[:n_nodes], left[:n_nodes], right[:n_nodes],
            start[:n_nodes], end[:n_nodes], depth[:n_nodes])


@njit(cache=True)
def _evaluate(X, target, classes, n_classes, idx, criterion, min_split, min_leaf, max_depth,
              allowed, n_try, keys, node, start, end, depth, cand_f, cand_cut, cand_gain):
    s = start[node]
    e = end[node]
    n = e - s
    cand_f[node] = -1
    if n < min_split or n < 2:
        return
    if max_depth >= 0 and depth[node] >= max_depth:
        return
    imp = impurity(target, classes, n_classes, idx, s, e, criterion)
    if imp <= 0.0:
        return
    feats = _node_features(allowed, n_try, keys, node)
    f, c, sc = best_split(X, target, classes, n_classes, idx, s, e, feats, criterion, min_leaf)
    if f < 0:
        return
    cand_f[node] = f
    cand_cut[node] = c
    cand_gain[node] = n * (imp - sc)


@njit(cache=True)
def apply(X, feature, cut, left, right):
    """Leaf index reached by every row of ``X``."""
    out = np.empty(X.shape[0], dtype=np.int64)
    for i in range(X.shape[0]):
        k = 0
        while feature[k] >= 0:
            if X[i, feature[k]] <= cut[k]:
                k = left[k]
            else:
                k = right[k]
        out[i] = k
    return out
