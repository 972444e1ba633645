"""Bootstrap random forest of CART trees."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import EmptyInput
from .tree import RegressionTree, fit_tree

BOOTSTRAP_GENERATOR = "numpy.random.PCG64(SeedSequence([seed, tree_index]))"


def bootstrap_indices(n: int, seed: int, tree_index: int) -> np.ndarray:
    """n draws with replacement; depends only on (seed, tree_index)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tree_index])))
    return rng.integers(0, n, size=n)


@dataclass(frozen=True, eq=False)
class ForestModel:
    trees: tuple
    seed: int
    n_estimators: int = 100
    max_depth: Optional[int] = 6

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total = total + tree.predict(X)
        return total / len(self.trees)

    def to_dict(self) -> dict:
        return {
            "kind": "forest",
            "seed": self.seed,
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ForestModel":
        trees = tuple(RegressionTree.from_dict(t) for t in data["trees"])
        return cls(trees, int(data["seed"]), int(data["n_estimators"]), data["max_depth"])


def _n_workers(n_jobs: Optional[int]) -> int:
    if n_jobs is None or n_jobs == 1:
        return 1
    if n_jobs < 0:
        return os.cpu_count() or 1
    return n_jobs


def fit_forest(X, y, n_estimators: int = 100, max_depth: Optional[int] = 6, seed: int = 0,
               n_jobs: Optional[int] = -1, min_samples_leaf: int = 1) -> ForestModel:
    """Fit ``n_estimators`` trees on seeded bootstrap resamples.

    Tree ``i`` draws its bootstrap from ``(seed, i)``, so the result does not
    depend on ``n_jobs``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64).ravel()
    n = X.shape[0]
    if n < 2:
        raise EmptyInput(f"a forest needs at least 2 rows, got {n}")
    if n_estimators < 1:
        raise ValueError("n_estimators must be >= 1")

    def grow(i):
        idx = bootstrap_indices(n, seed, i)
        return fit_tree(X[idx], y[idx], max_depth=max_depth, min_samples_leaf=min_samples_leaf)

    workers = min(_n_workers(n_jobs), n_estimators)
    if workers == 1:
        trees = [grow(i) for i in range(n_estimators)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trees = list(pool.map(grow, range(n_estimators)))
    return ForestModel(tuple(trees), seed, n_estimators, max_depth)
