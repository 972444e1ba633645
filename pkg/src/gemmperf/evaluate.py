"""Accuracy metrics, calibration lines and the dimension/metric correlation table."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .core import TARGETS, Dataset
from .errors import AllExcluded, EmptyDataset, LengthMismatch, ZeroVariance
from .features import target_matrix
from .preprocess import percentile

ZERO_ACTUAL = 1e-12
PRODUCT_ROWS = ("M×N", "M×K", "N×K", "M×N×K")
METRIC_COLUMNS = ("Runtime", "Power", "Energy", "TFLOPS")


def _pair(actual, predicted, min_len=1):
    a = np.asarray(actual, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if a.shape != p.shape:
        raise LengthMismatch(f"lengths differ: {a.size} vs {p.size}")
    if a.size < min_len:
        raise LengthMismatch(f"need at least {min_len} values, got {a.size}")
    return a, p


def _require_variance(x, what):
    if np.ptp(x) == 0:
        raise ZeroVariance(f"{what} has zero variance")


def r2_score(actual, predicted) -> float:
    a, p = _pair(actual, predicted, 2)
    _require_variance(a, "actual")
    ss_res = np.sum((a - p) ** 2)
    ss_tot = np.sum((a - a.mean()) ** 2)
    return float(1.0 - ss_res / ss_tot)


def mse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.mean((a - p) ** 2))


def mae(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def pct_errors(actual, predicted):
    """(median %, mean %, n_excluded); rows with |actual| < 1e-12 are skipped."""
    a, p = _pair(actual, predicted)
    keep = np.abs(a) >= ZERO_ACTUAL
    if not keep.any():
        raise AllExcluded("every actual value is zero")
    errs = 100.0 * np.abs(p[keep] - a[keep]) / np.abs(a[keep])
    return percentile(errs, 0.5), float(errs.mean()), int((~keep).sum())


def calibration_line(actual, predicted):
    """Slope and intercept of ``predicted ~ slope * actual + intercept``."""
    a, p = _pair(actual, predicted, 2)
    _require_variance(a, "actual")
    da = a - a.mean()
    scale = np.max(np.abs(da))  # guards against underflow in da * da
    u = da / scale
    slope = np.sum(u * ((p - p.mean()) / scale)) / np.sum(u * u)
    return float(slope), float(p.mean() - slope * a.mean())


def pearson(x, y) -> float:
    """Population-form Pearson correlation."""
    x, y = _pair(x, y, 2)
    _require_variance(x, "x")
    _require_variance(y, "y")
    dx = x - x.mean()
    dy = y - y.mean()
    dx, dy = dx / np.max(np.abs(dx)), dy / np.max(np.abs(dy))
    r = np.mean(dx * dy) / (np.sqrt(np.mean(dx * dx)) * np.sqrt(np.mean(dy * dy)))
    return float(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class MetricBundle:
    r2: float
    mse: float
    mae: float
    median_pct_error: float
    mean_pct_error: float
    n_samples: int
    n_excluded_zero_actual: int


def metric_bundle(actual, predicted) -> MetricBundle:
    a, p = _pair(actual, predicted, 2)
    med, mean, excluded = pct_errors(a, p)
    return MetricBundle(r2_score(a, p), mse(a, p), mae(a, p), med, mean, int(a.size), excluded)


@dataclass(frozen=True)
class CorrelationMatrix:
    rows: tuple
    columns: tuple
    values: tuple  # tuple of row tuples; None where undefined

    def get(self, row, column):
        return self.values[self.rows.index(row)][self.columns.index(column)]


def _products(dataset: Dataset) -> np.ndarray:
    out = np.empty((len(dataset), 4))
    for i, rec in enumerate(dataset.records):
        c = rec.config
        out[i] = (c.m * c.n, c.m * c.k, c.n * c.k, c.m * c.n * c.k)
    return out


def correlation_matrix(dataset: Dataset) -> CorrelationMatrix:
    """Pearson r of each dimension product against each measured target.

    Cells without enough finite data or with zero variance are ``None``.
    """
    if len(dataset) < 2:
        raise EmptyDataset("correlation needs at least 2 records")
    prods = _products(dataset)
    targets = target_matrix(dataset)
    values = []
    for i in range(len(PRODUCT_ROWS)):
        row = []
        for j in range(len(TARGETS)):
            ok = np.isfinite(targets[:, j])
            try:
                row.append(pearson(prods[ok, i], targets[ok, j]))
            except (ZeroVariance, LengthMismatch):
                row.append(None)
        values.append(tuple(row))
    return CorrelationMatrix(PRODUCT_ROWS, METRIC_COLUMNS, tuple(values))


@dataclass(frozen=True)
class EvaluationReport:
    metrics: dict       # target -> MetricBundle
    calibration: dict   # target -> (slope, intercept)
    correlation: CorrelationMatrix
    n_samples: int

    def to_text(self) -> str:
        lines = [f"evaluation on {self.n_samples} samples", ""]
        head = f"{'target':<12}{'R2':>10}{'MSE':>14}{'MAE':>12}{'Med%Err':>10}{'Mean%Err':>10}{'slope':>9}{'icept':>11}"
        lines.append(head)
        for name in TARGETS:
            m = self.metrics[name]
            slope, icept = self.calibration[name]
            lines.append(f"{name:<12}{m.r2:>10.4f}{m.mse:>14.6g}{m.mae:>12.6g}"
                         f"{m.median_pct_error:>10.2f}{m.mean_pct_error:>10.2f}{slope:>9.4f}{icept:>11.4g}")
        lines.append("")
        lines.append(render_correlation_text(self.correlation))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["section", "row", "column", "value"])
        for name in TARGETS:
            m = self.metrics[name]
            for field_name in ("r2", "mse", "mae", "median_pct_error", "mean_pct_error",
                               "n_samples", "n_excluded_zero_actual"):
                writer.writerow(["metric", name, field_name, repr(getattr(m, field_name))])
        for name in TARGETS:
            slope, icept = self.calibration[name]
            writer.writerow(["calibration", name, "slope", repr(slope)])
            writer.writerow(["calibration", name, "intercept", repr(icept)])
        for row in self.correlation.rows:
            for col in self.correlation.columns:
                v = self.correlation.get(row, col)
                writer.writerow(["correlation", row, col, "" if v is None else repr(v)])
        return buf.getvalue()


def parse_report_csv(text: str) -> dict:
    """Inverse of :meth:`EvaluationReport.to_csv` as ``{(section, row, column): value}``."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["section", "row", "column", "value"]:
        raise ValueError("not an evaluation report CSV")
    out = {}
    for section, row, col, value in reader:
        if value == "":
            out[(section, row, col)] = None
        elif col in ("n_samples", "n_excluded_zero_actual"):
            out[(section, row, col)] = int(value)
        else:
            out[(section, row, col)] = float(value)
    return out


def render_correlation_text(cm: CorrelationMatrix) -> str:
    lines = [f"{'':<8}" + "".join(f"{c:>10}" for c in cm.columns)]
    for row, vals in zip(cm.rows, cm.values):
        cells = "".join(f"{'—':>10}" if v is None else f"{v:>10.2f}" for v in vals)
        lines.append(f"{row:<8}{cells}")
    return "\n".join(lines)


def render_correlation_csv(cm: CorrelationMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dimension", *cm.columns])
    for row, vals in zip(cm.rows, cm.values):
        writer.writerow([row, *("" if v is None else repr(v) for v in vals)])
    return buf.getvalue()


def evaluate_model(model, test: Dataset) -> EvaluationReport:
    """Score ``model`` against the raw targets of ``test``.

    Rows whose actual value is absent or non-finite are dropped per target.
    """
    if len(test) == 0:
        raise EmptyDataset("test set is empty")
    pred = model.predict_matrix([r.config for r in test.records])
    actual = target_matrix(test)
    metrics, calibration = {}, {}
    for j, name in enumerate(TARGETS):
        ok = np.isfinite(actual[:, j])
        metrics[name] = metric_bundle(actual[ok, j], pred[ok, j])
        calibration[name] = calibration_line(actual[ok, j], pred[ok, j])
    corr = correlation_matrix(test) if len(test) >= 2 else None
    return EvaluationReport(metrics, calibration, corr, len(test))
