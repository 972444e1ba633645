"""Cleaning pipeline (clip -> impute), standardization and the train/test split.

Missing values are represented as NaN inside numeric arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllMissing, EmptyInput, IncompleteMatrix, TooFewRows

LOW_Q = 0.01
HIGH_Q = 0.99
CONSTANT_STD = 1e-12
SPLIT_GENERATOR = "numpy.random.PCG64 seeded Fisher-Yates"


@dataclass(frozen=True)
class ColumnStats:
    """Fitted statistics of one column.

    The mean is carried as ``mean + mean_residual`` so that near-constant
    columns still standardize to an exact zero mean.
    """

    lower_clip: float
    upper_clip: float
    median: float
    mean: float
    std: float
    mean_residual: float = 0.0

    @property
    def constant(self) -> bool:
        return self.std < CONSTANT_STD

    def transform(self, column: np.ndarray) -> np.ndarray:
        if self.constant:
            return np.zeros_like(column)
        return ((column - self.mean) - self.mean_residual) / self.std


def _moments(column: np.ndarray) -> tuple[float, float, float]:
    """(mean, residual, population std) with a compensated second pass."""
    if column.size == 0:
        return 0.0, 0.0, 0.0
    mean = float(column.mean())
    dev = column - mean
    residual = float(dev.mean())
    std = float(np.sqrt(np.mean((dev - residual) ** 2)))
    return mean, residual, std


@dataclass(frozen=True)
class PreprocessStats:
    """Per-column statistics fitted on training data, in column order."""

    columns: tuple
    stats: tuple

    def __getitem__(self, name) -> ColumnStats:
        return self.stats[self.columns.index(name)]

    def to_dict(self) -> dict:
        return {
            "columns": list(self.columns),
            "lower_clip": [s.lower_clip for s in self.stats],
            "upper_clip": [s.upper_clip for s in self.stats],
            "median": [s.median for s in self.stats],
            "mean": [s.mean for s in self.stats],
            "std": [s.std for s in self.stats],
            "mean_residual": [s.mean_residual for s in self.stats],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PreprocessStats":
        stats = tuple(
            ColumnStats(*(float(v) for v in vals))
            for vals in zip(data["lower_clip"], data["upper_clip"], data["median"], data["mean"], data["std"],
                            data["mean_residual"])
        )
        return cls(tuple(data["columns"]), stats)


def percentile(values, q: float) -> float:
    """Linear-interpolation percentile, ``q`` in [0, 1]."""
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if v.size == 0:
        raise EmptyInput("percentile of an empty list")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must lie in [0, 1], got {q}")
    pos = q * (v.size - 1)
    lo = math.floor(pos)
    if lo >= v.size - 1:
        return float(v[-1])
    frac = pos - lo
    return float(v[lo] + frac * (v[lo + 1] - v[lo]))


def _present(column: np.ndarray) -> np.ndarray:
    present = column[~np.isnan(column)]
    if present.size == 0:
        raise AllMissing("column has no present values")
    return present


def clip_outliers(column, low_q: float = LOW_Q, high_q: float = HIGH_Q, bounds=None):
    """Clamp present values to the [low_q, high_q] percentiles of the present values.

    Returns ``(clipped, lower, upper)``. NaN entries stay NaN. Pass ``bounds``
    to reuse previously fitted limits.
    """
    col = np.asarray(column, dtype=np.float64)
    if bounds is None:
        present = _present(col)
        lower, upper = percentile(present, low_q), percentile(present, high_q)
    else:
        lower, upper = bounds
    # np.clip keeps NaN as NaN
    return np.clip(col, lower, upper), lower, upper


def impute_median(column, median=None):
    """Fill NaN entries with the median of the present values."""
    col = np.asarray(column, dtype=np.float64)
    if median is None:
        median = percentile(_present(col), 0.5)
    out = col.copy()
    out[np.isnan(out)] = median
    return out, median


def clean_columns(matrix, names, stats: PreprocessStats | None = None):
    """Clip then impute each column, in that order.

    Imputing first would let the fill value shift the percentiles, so the
    order is fixed. Returns ``(cleaned, stats)``; when ``stats`` is given its
    bounds and medians are reused (mean/std are filled in by standardize).
    """
    data = np.array(matrix, dtype=np.float64, copy=True)
    fitted = []
    for j, name in enumerate(names):
        if stats is None:
            clipped, lo, hi = clip_outliers(data[:, j])
            filled, med = impute_median(clipped)
        else:
            s = stats[name]
            lo, hi, med = s.lower_clip, s.upper_clip, s.median
            clipped, _, _ = clip_outliers(data[:, j], bounds=(lo, hi))
            filled, _ = impute_median(clipped, med)
        data[:, j] = filled
        fitted.append((lo, hi, med))
    if stats is not None:
        return data, stats
    out = PreprocessStats(
        tuple(names),
        tuple(ColumnStats(lo, hi, med, mu, sd, res)
              for (lo, hi, med), (mu, res, sd) in zip(fitted, (_moments(data[:, j]) for j in range(len(names))))),
    )
    return data, out


def standardize(matrix, stats: PreprocessStats | None = None, names=None):
    """Scale each column to zero mean, unit population std.

    Constant columns (std < 1e-12) map to zeros. With ``stats`` the stored
    mean/std are reused, otherwise they are fitted on ``matrix``.
    """
    data = np.asarray(matrix, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("standardize expects a 2-D matrix")
    if np.isnan(data).any():
        raise IncompleteMatrix("standardize requires a matrix without missing values")
    if names is None:
        names = tuple(stats.columns) if stats is not None else tuple(f"x{j}" for j in range(data.shape[1]))
    if stats is None:
        fitted = []
        for j in range(data.shape[1]):
            col = data[:, j]
            mu, res, sd = _moments(col)
            lo, hi = (float(col.min()), float(col.max())) if col.size else (0.0, 0.0)
            med = percentile(col, 0.5) if col.size else 0.0
            fitted.append(ColumnStats(lo, hi, med, mu, sd, res))
        stats = PreprocessStats(tuple(names), tuple(fitted))
        col_stats = stats.stats
    else:
        col_stats = [stats[name] for name in names]
    out = np.empty_like(data)
    for j, s in enumerate(col_stats):
        out[:, j] = s.transform(data[:, j])
    return out, stats


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def train_test_split(n: int, test_fraction: float = 0.2, seed: int = 0):
    """Seeded Fisher-Yates shuffle of ``range(n)``; the first round(n*f) go to test.

    Random source: ``numpy.random.Generator(PCG64(seed))``. Returns
    ``(train_indices, test_indices)`` as int arrays in shuffled order.
    """
    if n < 2:
        raise TooFewRows(f"train/test split needs at least 2 rows, got {n}")
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError("test_fraction must lie in [0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.arange(n)
    # j_i uniform on [0, i] for i = n-1 .. 1
    swaps = rng.integers(0, np.arange(n, 1, -1))
    for i, j in zip(range(n - 1, 0, -1), swaps.tolist()):
        idx[i], idx[j] = idx[j], idx[i]
    n_test = _round_half_away(n * test_fraction)
    return idx[n_test:].copy(), idx[:n_test].copy()
