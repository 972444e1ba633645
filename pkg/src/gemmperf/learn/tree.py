"""CART regression trees on top of the compiled or pure-numpy kernel.

The kernel is chosen at import: the Cython extension when it was built, the
numpy implementation otherwise. Set ``GEMMPERF_PURE_PYTHON=1`` to force the
fallback. Both produce bit-identical trees.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import EmptyInput
from . import _pytree

if os.environ.get("GEMMPERF_PURE_PYTHON", "") not in ("", "0"):
    _kernel = _pytree
    BACKEND = "python"
else:
    try:
        from . import _ctree as _kernel
        BACKEND = "cython"
    except ImportError:
        _kernel = _pytree
        BACKEND = "python"

KERNELS = {"python": _pytree}
if BACKEND == "cython":
    KERNELS["cython"] = _kernel


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Node arrays in preorder; ``feature[i] == -1`` marks a leaf.

    Internal nodes route ``x[feature] <= threshold`` to ``left``. ``value`` is
    the mean training target of the node and ``n_samples`` its sample count.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray
    max_depth: Optional[int] = None

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature < 0

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):  # preorder: parents precede children
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[self.right[i]] = depths[i] + 1
        return int(depths.max())

    def predict(self, X, kernel=None) -> np.ndarray:
        kern = _kernel if kernel is None else KERNELS[kernel]
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            return np.empty(0)
        return kern.apply_tree(X, self.feature, self.threshold, self.left, self.right, self.value)

    def same_as(self, other: "RegressionTree") -> bool:
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("feature", "threshold", "left", "right", "value", "n_samples")
        )

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RegressionTree":
        ints = {k: np.asarray(data[k], dtype=np.int64) for k in ("feature", "left", "right", "n_samples")}
        floats = {k: np.asarray(data[k], dtype=np.float64) for k in ("threshold", "value")}
        return cls(max_depth=data.get("max_depth"), **ints, **floats)


def fit_tree(X, y, max_depth: Optional[int] = None, min_samples_leaf: int = 1, kernel=None) -> RegressionTree:
    """Greedy variance-reduction CART; every feature is searched at every node."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyInput("fit_tree needs at least one sample")
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y have different numbers of rows")
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be >= 1")
    kern = _kernel if kernel is None else KERNELS[kernel]
    md = -1 if max_depth is None else int(max_depth)
    arrays = kern.build_tree(X, y, md, int(min_samples_leaf))
    return RegressionTree(*arrays, max_depth=max_depth)
