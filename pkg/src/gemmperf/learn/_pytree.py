"""Pure numpy CART kernel. Reference for, and fallback to, ``_ctree``.

Both kernels follow the same arithmetic step for step so that they grow
bit-identical trees:

* node samples are kept in ascending row order; ties in a feature are broken
  by that order (stable sort);
* targets are centred on the node mean, and prefix sums are accumulated
  sequentially in sorted order;
* the gain at split position ``i`` is ``sL*sL/nL + sR*sR/nR - tot*tot/n``;
* the first maximum in (feature, position) order wins, and a split is taken
  only if its gain exceeds ``1e-12`` times the node's sum of squares;
* thresholds are midpoints of consecutive distinct values; samples with
  ``x <= threshold`` go left.

Nodes are numbered in depth-first preorder. Leaves have ``feature == -1``.
"""
import numpy as np

GAIN_RTOL = 1e-12


def _seqsum(a):
    # cumsum accumulates strictly left to right, unlike np.sum (pairwise)
    return np.cumsum(a)[-1]


def _best_split(xn, yc, sse, min_samples_leaf):
    n = xn.shape[0]
    order = np.argsort(xn, axis=0, kind="stable")
    xs = np.take_along_axis(xn, order, axis=0)
    csum = np.cumsum(yc[order], axis=0)
    tot = csum[-1]
    s_left = csum[:-1]
    s_right = tot - s_left
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    gain = s_left * s_left / n_left + s_right * s_right / n_right - tot * tot / n
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    gain = np.where(valid, gain, -np.inf)
    flat = gain.T.ravel()
    best = int(np.argmax(flat))
    f, i = divmod(best, n - 1)
    if not flat[best] > GAIN_RTOL * sse:
        return None
    lo, hi = xs[i, f], xs[i + 1, f]
    thr = (lo + hi) / 2.0
    if not thr < hi:
        thr = lo
    return f, thr


def build_tree(X, y, max_depth, min_samples_leaf):
    """Grow a regression tree; ``max_depth < 0`` means unlimited.

    Returns ``(feature, threshold, left, right, value, n_samples)`` arrays.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    feature, threshold, left, right, value, count = [], [], [], [], [], []
    # (rows, depth, parent, is_left); right pushed before left gives preorder
    stack = [(np.arange(X.shape[0]), 0, -1, False)]
    while stack:
        rows, depth, parent, is_left = stack.pop()
        node = len(feature)
        if parent >= 0:
            (left if is_left else right)[parent] = node
        yn = y[rows]
        n = rows.shape[0]
        mean = _seqsum(yn) / n
        pure = yn.max() == yn.min()
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(yn[0] if pure else mean)
        count.append(n)
        if pure or n < 2 * min_samples_leaf or (0 <= max_depth <= depth):
            continue
        yc = yn - mean
        split = _best_split(X[rows], yc, _seqsum(yc * yc), min_samples_leaf)
        if split is None:
            continue
        f, thr = split
        feature[node] = f
        threshold[node] = thr
        go_left = X[rows, f] <= thr
        stack.append((rows[~go_left], depth + 1, node, False))
        stack.append((rows[go_left], depth + 1, node, True))
    return (
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
        np.array(count, dtype=np.int64),
    )


def apply_tree(X, feature, threshold, left, right, value):
    """Predict every row of ``X`` by walking the node arrays."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    node = np.zeros(X.shape[0], dtype=np.int64)
    active = np.arange(X.shape[0])
    while active.size:
        f = feature[node[active]]
        internal = f >= 0
        active = active[internal]
        if not active.size:
            break
        cur = node[active]
        go_left = X[active, f[internal]] <= threshold[cur]
        node[active] = np.where(go_left, left[cur], right[cur])
    return value[node]
