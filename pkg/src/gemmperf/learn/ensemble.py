"""Weighted ensembles of multi-output predictors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import TARGETS, Dataset
from ..errors import WeightSumInvalid
from ..features import target_matrix

WEIGHT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class EnsembleModel:
    """``members[i]`` gets weight ``weights[i, t]`` for target ``t``.

    Members only need a ``predict_matrix(configs) -> (n, 4)`` method.
    """

    members: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim == 1:
            w = np.repeat(w[:, None], len(TARGETS), axis=1)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "members", tuple(self.members))
        check_weights(w, len(self.members))

    def predict_matrix(self, configs) -> np.ndarray:
        configs = list(configs)
        out = np.zeros((len(configs), len(TARGETS)))
        for member, w in zip(self.members, self.weights):
            out = out + member.predict_matrix(configs) * w
        return out


def check_weights(weights: np.ndarray, n_members: int) -> None:
    if weights.shape != (n_members, len(TARGETS)):
        raise WeightSumInvalid(f"expected weights of shape ({n_members}, {len(TARGETS)}), got {weights.shape}")
    if n_members == 0:
        raise WeightSumInvalid("an ensemble needs at least one member")
    if (weights < 0).any() or not np.isfinite(weights).all():
        raise WeightSumInvalid("weights must be finite and non-negative")
    sums = weights.sum(axis=0)
    if np.any(np.abs(sums - 1.0) > WEIGHT_TOL):
        raise WeightSumInvalid(f"weights must sum to 1 per target, got {sums.tolist()}")


def uniform_ensemble(members) -> EnsembleModel:
    members = tuple(members)
    return EnsembleModel(members, np.full(len(members), 1.0 / len(members)))


def ensemble_predict(ensemble: EnsembleModel, configs) -> list[dict]:
    mat = ensemble.predict_matrix(configs)
    return [dict(zip(TARGETS, (float(v) for v in row))) for row in mat]


def simplex_least_squares(P: np.ndarray, y: np.ndarray, n_sweeps: int = 200, tol: float = 1e-14) -> np.ndarray:
    """min ||P w - y||^2 subject to w >= 0, sum(w) = 1.

    Coordinate descent over pairs: each step moves mass between two weights,
    which keeps the sum fixed, and clips the step so both stay non-negative.
    """
    P = np.asarray(P, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    k = P.shape[1]
    w = np.full(k, 1.0 / k)
    resid = P @ w - y
    for _ in range(n_sweeps):
        moved = 0.0
        for i in range(k):
            for j in range(i + 1, k):
                d = P[:, i] - P[:, j]
                dd = d @ d
                if dd == 0.0:
                    continue
                step = -(resid @ d) / dd
                step = min(max(step, -w[i]), w[j])
                if step == 0.0:
                    continue
                w[i] += step
                w[j] -= step
                resid = resid + step * d
                moved = max(moved, abs(step))
        if moved < tol:
            break
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def calibrate_weights(members, validation: Dataset) -> EnsembleModel:
    """Fit per-target simplex weights on a validation set."""
    members = tuple(members)
    configs = [r.config for r in validation.records]
    preds = [m.predict_matrix(configs) for m in members]
    actual = target_matrix(validation)
    weights = np.empty((len(members), len(TARGETS)))
    for t in range(len(TARGETS)):
        ok = np.isfinite(actual[:, t])
        P = np.column_stack([p[ok, t] for p in preds])
        weights[:, t] = simplex_least_squares(P, actual[ok, t])
    return EnsembleModel(members, weights)
