"""Ordinary least squares with intercept, via the normal equations."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSystem

log = logging.getLogger(__name__)

RIDGE_LAMBDA = 1e-8
# condition number above which the normal equations count as singular
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class LinearModel:
    coefficients: np.ndarray
    intercept: float
    ridge_used: bool = False

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.coefficients + self.intercept

    def to_dict(self) -> dict:
        return {
            "kind": "linear",
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "ridge_used": self.ridge_used,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LinearModel":
        return cls(np.asarray(data["coefficients"], dtype=np.float64), float(data["intercept"]),
                   bool(data.get("ridge_used", False)))


def fit_linear(X, y) -> LinearModel:
    """Least-squares fit of ``y ~ X @ w + b``.

    The intercept is handled by centring. When the Gram matrix is singular or
    badly conditioned, ``1e-8 * I`` is added (the intercept is not penalized).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X must be 2-D with one row per target value")
    n, d = X.shape
    if n < d + 1:
        raise DegenerateSystem(f"need at least {d + 1} rows for {d} features, got {n}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise ValueError("fit_linear requires complete, finite data")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    gram = Xc.T @ Xc
    rhs = Xc.T @ yc
    ridge = d > 0 and not np.linalg.cond(gram) < MAX_CONDITION
    if ridge:
        log.info("normal equations singular; using ridge fallback lambda=%g", RIDGE_LAMBDA)
        gram = gram + RIDGE_LAMBDA * np.eye(d)
    try:
        coef = np.linalg.solve(gram, rhs) if d else np.zeros(0)
    except np.linalg.LinAlgError:
        raise DegenerateSystem("normal equations are singular even with the ridge fallback") from None
    if not np.isfinite(coef).all():
        raise DegenerateSystem("non-finite coefficients")
    intercept = float(y_mean - x_mean @ coef)
    return LinearModel(coef, intercept, bool(ridge))
