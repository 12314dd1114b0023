"""Numba kernels for CART tree building and forest voting.

Trees are grown with Gini impurity.  Two split strategies are supported:
exhaustive midpoint search (random-forest style) and one uniformly random
threshold per candidate feature (extra-trees style).  Tie-breaks are fixed
for determinism: candidate features are scanned in ascending index order
and thresholds in ascending value order, with strictly-better quality
required to displace the incumbent, so equal-quality splits resolve to the
smallest feature index and then the smallest threshold.

All randomness comes from numpy's legacy MT19937 seeded once per tree, so
a tree is a pure function of (data, hyperparameters, seed).
"""

import numpy as np
from numba import njit

UNLIMITED_DEPTH = 2**62


@njit(cache=True)
def build_tree(X, y, n_classes, seed, max_depth, min_samples_split,
               max_features, bootstrap, random_thresholds):
    """Grow one tree; returns (feature, threshold, left, right, leaf_class).

    ``feature`` is -1 and ``leaf_class`` >= 0 on leaves.  Child indices are
    local to this tree.  ``y`` must be encoded as 0..n_classes-1.
    """
    np.random.seed(seed)
    n, p = X.shape
    samples = np.empty(n, np.int64)
    if bootstrap:
        for i in range(n):
            samples[i] = np.random.randint(0, n)
    else:
        for i in range(n):
            samples[i] = i

    cap = 2 * n + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    leaf_class = np.full(cap, -1, np.int64)

    stack_node = np.empty(cap, np.int64)
    stack_start = np.empty(cap, np.int64)
    stack_end = np.empty(cap, np.int64)
    stack_depth = np.empty(cap, np.int64)

    counts = np.zeros(n_classes, np.int64)
    left_counts = np.zeros(n_classes, np.int64)
    feat_idx = np.empty(p, np.int64)
    buf = np.empty(n, np.int64)

    n_nodes = 1
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n
    stack_depth[0] = 0
    top = 1
    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        m = end - start

        counts[:] = 0
        for i in range(start, end):
            counts[y[samples[i]]] += 1
        majority = 0
        for c in range(1, n_classes):
            if counts[c] > counts[majority]:
                majority = c

        if counts[majority] == m or m < min_samples_split or depth >= max_depth:
            leaf_class[node] = majority
            continue

        # draw the candidate feature subset, then scan it in index order
        for j in range(p):
            feat_idx[j] = j
        k = max_features if max_features < p else p
        for j in range(k):
            r = j + np.random.randint(0, p - j)
            tmp = feat_idx[j]
            feat_idx[j] = feat_idx[r]
            feat_idx[r] = tmp
        cand = np.sort(feat_idx[:k])

        parent_quality = 0.0
        for c in range(n_classes):
            parent_quality += counts[c] * counts[c]
        parent_quality /= m

        best_quality = -1.0
        best_f = -1
        best_t = 0.0
        for jj in range(k):
            f = cand[jj]
            if random_thresholds:
                lo = X[samples[start], f]
                hi = lo
                for i in range(start + 1, end):
                    v = X[samples[i], f]
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
                if lo == hi:
                    continue
                t = np.random.uniform(lo, hi)
                if t >= hi:  # fp rounding can hit the open upper edge
                    t = lo
                left_counts[:] = 0
                ml = 0
                for i in range(start, end):
                    si = samples[i]
                    if X[si, f] <= t:
                        left_counts[y[si]] += 1
                        ml += 1
                mr = m - ml
                if ml == 0 or mr == 0:
                    continue
                ql = 0.0
                qr = 0.0
                for c in range(n_classes):
                    lc = left_counts[c]
                    rc = counts[c] - lc
                    ql += lc * lc
                    qr += rc * rc
                quality = ql / ml + qr / mr
                if quality > best_quality:
                    best_quality = quality
                    best_f = f
                    best_t = t
            else:
                vals = np.empty(m, np.float64)
                for i in range(m):
                    vals[i] = X[samples[start + i], f]
                order = np.argsort(vals)
                left_counts[:] = 0
                ml = 0
                for i in range(m - 1):
                    si = samples[start + order[i]]
                    left_counts[y[si]] += 1
                    ml += 1
                    v0 = vals[order[i]]
                    v1 = vals[order[i + 1]]
                    if v0 == v1:
                        continue
                    t = 0.5 * (v0 + v1)
                    if t >= v1:  # fp guard: degenerate midpoint
                        t = v0
                    ql = 0.0
                    qr = 0.0
                    for c in range(n_classes):
                        lc = left_counts[c]
                        rc = counts[c] - lc
                        ql += lc * lc
                        qr += rc * rc
                    quality = ql / ml + qr / (m - ml)
                    if quality > best_quality:
                        best_quality = quality
                        best_f = f
                        best_t = t

        usable = best_f >= 0
        if usable and not random_thresholds:
            usable = best_quality > parent_quality  # require positive Gini gain
        if not usable:
            leaf_class[node] = majority
            continue

        # stable in-place partition (left block, then buffered right block)
        nl = 0
        nr = 0
        for i in range(start, end):
            si = samples[i]
            if X[si, best_f] <= best_t:
                samples[start + nl] = si
                nl += 1
            else:
                buf[nr] = si
                nr += 1
        for i in range(nr):
            samples[start + nl + i] = buf[i]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_t
        left[node] = lid
        right[node] = rid
        stack_node[top] = rid
        stack_start[top] = start + nl
        stack_end[top] = end
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = lid
        stack_start[top] = start
        stack_end[top] = start + nl
        stack_depth[top] = depth + 1
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], leaf_class[:n_nodes])


@njit(cache=True)
def forest_votes(X, feature, threshold, left, right, leaf_class, offsets,
                 n_classes):
    """Per-sample class votes over all trees (trees concatenated via offsets)."""
    n = X.shape[0]
    n_trees = len(offsets) - 1
    votes = np.zeros((n, n_classes), np.int64)
    for t in range(n_trees):
        base = offsets[t]
        for i in range(n):
            node = 0
            while leaf_class[base + node] < 0:
                if X[i, feature[base + node]] <= threshold[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            votes[i, leaf_class[base + node]] += 1
    return votes
