# cython: language_level=3
"""Compiled CART kernel. Mirrors ``_pytree`` operation for operation.

Features are presorted once per tree; each split then stably partitions the
per-feature index segments, so the in-node order of tied values matches the
fallback's stable argsort. Tree growth runs without the GIL so forests can be
fitted from a thread pool.
"""
import numpy as np

from libc.stdlib cimport malloc, free, qsort
from libc.math cimport INFINITY

cdef double GAIN_RTOL = 1e-12


cdef struct Keyed:
    double v
    Py_ssize_t idx


cdef struct Frame:
    Py_ssize_t start
    Py_ssize_t end
    Py_ssize_t depth
    Py_ssize_t parent
    int is_left


cdef int _cmp_keyed(const void* a, const void* b) noexcept nogil:
    cdef Keyed* ka = <Keyed*>a
    cdef Keyed* kb = <Keyed*>b
    if ka.v < kb.v:
        return -1
    if ka.v > kb.v:
        return 1
    if ka.idx < kb.idx:
        return -1
    if ka.idx > kb.idx:
        return 1
    return 0


cdef Py_ssize_t _grow(const double[:, ::1] X, const double[::1] y,
                      Py_ssize_t max_depth, Py_ssize_t min_leaf,
                      Py_ssize_t* order, double* yc, char* goes_left, Py_ssize_t* tmp,
                      Frame* stack,
                      long long* feature, double* threshold, long long* left,
                      long long* right, double* value, long long* count) noexcept nogil:
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t n_nodes = 0
    cdef Py_ssize_t node, start, end, depth, m, i, f, s, idx, best_f, best_i, nl, nr, w_left, w_right
    cdef Py_ssize_t* pos
    cdef Py_ssize_t* seg
    cdef double total, mean, ymin, ymax, yv, sse, tot, s_left, s_right, gain, best_gain, lo, hi, thr
    cdef double dn, dl, dr
    cdef bint pure

    stack[0].start = 0
    stack[0].end = n
    stack[0].depth = 0
    stack[0].parent = -1
    stack[0].is_left = 0
    top = 1
    while top > 0:
        top -= 1
        start = stack[top].start
        end = stack[top].end
        depth = stack[top].depth
        node = n_nodes
        n_nodes += 1
        if stack[top].parent >= 0:
            if stack[top].is_left:
                left[stack[top].parent] = node
            else:
                right[stack[top].parent] = node
        m = end - start
        pos = order + d * n + start  # node samples in ascending row order

        total = 0.0
        ymin = y[pos[0]]
        ymax = ymin
        for i in range(m):
            yv = y[pos[i]]
            total = total + yv
            if yv < ymin:
                ymin = yv
            if yv > ymax:
                ymax = yv
        dn = <double>m
        mean = total / dn
        pure = ymax == ymin
        feature[node] = -1
        threshold[node] = 0.0
        left[node] = -1
        right[node] = -1
        value[node] = y[pos[0]] if pure else mean
        count[node] = m
        if pure or m < 2 * min_leaf or (max_depth >= 0 and depth >= max_depth):
            continue

        sse = 0.0
        for i in range(m):
            idx = pos[i]
            yc[idx] = y[idx] - mean
            sse = sse + yc[idx] * yc[idx]

        best_gain = -INFINITY
        best_f = -1
        best_i = -1
        for f in range(d):
            seg = order + f * n + start
            tot = 0.0
            for i in range(m):
                tot = tot + yc[seg[i]]
            s_left = 0.0
            for i in range(m - 1):
                s_left = s_left + yc[seg[i]]
                nl = i + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                if not (X[seg[i + 1], f] > X[seg[i], f]):
                    continue
                s_right = tot - s_left
                dl = <double>nl
                dr = <double>nr
                gain = s_left * s_left / dl + s_right * s_right / dr - tot * tot / dn
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_i = i
        if best_f < 0 or not (best_gain > GAIN_RTOL * sse):
            continue

        seg = order + best_f * n + start
        lo = X[seg[best_i], best_f]
        hi = X[seg[best_i + 1], best_f]
        thr = (lo + hi) / 2.0
        if not (thr < hi):
            thr = lo
        feature[node] = best_f
        threshold[node] = thr

        for i in range(m):
            idx = pos[i]
            goes_left[idx] = X[idx, best_f] <= thr
        nl = 0
        for f in range(d + 1):
            seg = order + f * n + start
            w_left = 0
            w_right = 0
            for i in range(m):
                idx = seg[i]
                if goes_left[idx]:
                    seg[w_left] = idx
                    w_left += 1
                else:
                    tmp[w_right] = idx
                    w_right += 1
            for i in range(w_right):
                seg[w_left + i] = tmp[i]
            nl = w_left

        # right first so the left child is numbered next (preorder)
        stack[top].start = start + nl
        stack[top].end = end
        stack[top].depth = depth + 1
        stack[top].parent = node
        stack[top].is_left = 0
        top += 1
        stack[top].start = start
        stack[top].end = start + nl
        stack[top].depth = depth + 1
        stack[top].parent = node
        stack[top].is_left = 1
        top += 1
    return n_nodes


def build_tree(X, y, max_depth, min_samples_leaf):
    """Grow a regression tree; ``max_depth < 0`` means unlimited.

    Returns ``(feature, threshold, left, right, value, n_samples)`` arrays.
    """
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = Xv.shape[0]
    cdef Py_ssize_t d = Xv.shape[1]
    cdef Py_ssize_t cap = 2 * n
    cdef Py_ssize_t f, i, n_nodes
    cdef Py_ssize_t md = max_depth
    cdef Py_ssize_t msl = min_samples_leaf
    if n < 1:
        raise ValueError("cannot grow a tree on zero samples")
    if yv.shape[0] != n:
        raise ValueError("X and y have different lengths")

    feature = np.empty(cap, dtype=np.int64)
    threshold = np.empty(cap, dtype=np.float64)
    left = np.empty(cap, dtype=np.int64)
    right = np.empty(cap, dtype=np.int64)
    value = np.empty(cap, dtype=np.float64)
    count = np.empty(cap, dtype=np.int64)
    cdef long long[::1] fv = feature
    cdef double[::1] tv = threshold
    cdef long long[::1] lv = left
    cdef long long[::1] rv = right
    cdef double[::1] vv = value
    cdef long long[::1] cv = count

    cdef Py_ssize_t* order = <Py_ssize_t*>malloc((d + 1) * n * sizeof(Py_ssize_t))
    cdef double* yc = <double*>malloc(n * sizeof(double))
    cdef char* goes_left = <char*>malloc(n * sizeof(char))
    cdef Py_ssize_t* tmp = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    cdef Frame* stack = <Frame*>malloc((n + 1) * sizeof(Frame))
    cdef Keyed* keys = <Keyed*>malloc(n * sizeof(Keyed))
    if not (order and yc and goes_left and tmp and stack and keys):
        free(order); free(yc); free(goes_left); free(tmp); free(stack); free(keys)
        raise MemoryError()
    try:
        with nogil:
            for f in range(d):
                for i in range(n):
                    keys[i].v = Xv[i, f]
                    keys[i].idx = i
                qsort(keys, n, sizeof(Keyed), _cmp_keyed)
                for i in range(n):
                    order[f * n + i] = keys[i].idx
            for i in range(n):
                order[d * n + i] = i
            n_nodes = _grow(Xv, yv, md, msl, order, yc, goes_left, tmp, stack,
                            &fv[0], &tv[0], &lv[0], &rv[0], &vv[0], &cv[0])
    finally:
        free(order); free(yc); free(goes_left); free(tmp); free(stack); free(keys)
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(), left[:n_nodes].copy(),
            right[:n_nodes].copy(), value[:n_nodes].copy(), count[:n_nodes].copy())


def apply_tree(X, feature, threshold, left, right, value):
    """Predict every row of ``X`` by walking the node arrays."""
    cdef const double[:, ::1] Xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef const long long[::1] fv = np.ascontiguousarray(feature, dtype=np.int64)
    cdef const double[::1] tv = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef const long long[::1] lv = np.ascontiguousarray(left, dtype=np.int64)
    cdef const long long[::1] rv = np.ascontiguousarray(right, dtype=np.int64)
    cdef const double[::1] vv = np.ascontiguousarray(value, dtype=np.float64)
    out = np.empty(Xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, node
    with nogil:
        for i in range(Xv.shape[0]):
            node = 0
            while fv[node] >= 0:
                if Xv[i, fv[node]] <= tv[node]:
                    node = lv[node]
                else:
                    node = rv[node]
            ov[i] = vv[node]
    return out
