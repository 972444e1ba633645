"""Derived GEMM characteristics and the model's feature vector."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import LAYOUT_CODES, TARGETS, Dataset, DeviceModel, GemmConfig
from .errors import EmptyDataset, NonPositiveRuntime

BYTES_PER_ELEMENT = 4  # SGEMM

# Column order is part of the model file contract.
FEATURE_ORDER = (
    "m", "n", "k", "block_m", "block_n", "block_k", "stages", "alpha", "beta",
    "mn", "mk", "nk", "mnk", "total_flops", "bytes_accessed", "arithmetic_intensity",
    "layout_code", "tile_size",
)
# Encoded after cleaning; never clipped or imputed.
CATEGORICAL_FEATURES = ("layout_code", "tile_size")
NUMERIC_FEATURES = tuple(f for f in FEATURE_ORDER if f not in CATEGORICAL_FEATURES)


@dataclass(frozen=True)
class GemmCharacteristics:
    total_flops: float
    bytes_accessed: float
    arithmetic_intensity: float
    mn: float
    mk: float
    nk: float
    mnk: float


def _checked(value: int, what: str) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise OverflowError(f"{what} is not representable as a float")
    return out


def compute_gemm_characteristics(config: GemmConfig) -> GemmCharacteristics:
    m, n, k = config.m, config.n, config.k
    # integer arithmetic is exact; float conversion flags absurd sizes
    flops = _checked(2 * m * n * k, "total_flops")
    nbytes = _checked(BYTES_PER_ELEMENT * (m * k + k * n + m * n), "bytes_accessed")
    return GemmCharacteristics(
        total_flops=flops,
        bytes_accessed=nbytes,
        arithmetic_intensity=flops / nbytes,
        mn=_checked(m * n, "mn"),
        mk=_checked(m * k, "mk"),
        nk=_checked(n * k, "nk"),
        mnk=_checked(m * n * k, "mnk"),
    )


def tflops_from_runtime(config: GemmConfig, runtime_ms: float) -> float:
    """Achieved throughput 2*M*N*K / runtime, in TFLOP/s."""
    if not runtime_ms > 0:
        raise NonPositiveRuntime(f"runtime must be positive, got {runtime_ms}")
    return 2.0 * config.m * config.n * config.k / (runtime_ms / 1000.0) / 1e12


def tflops_efficiency(config: GemmConfig, runtime_ms: float, device: DeviceModel = DeviceModel()) -> float:
    """Achieved TFLOP/s as a fraction of the device peak."""
    return tflops_from_runtime(config, runtime_ms) / device.peak_tflops


def memory_efficiency(achieved_bandwidth_gbs: float, device: DeviceModel = DeviceModel()) -> float:
    """Achieved bandwidth as a percentage of peak."""
    if achieved_bandwidth_gbs < 0:
        raise ValueError("achieved bandwidth must be non-negative")
    return achieved_bandwidth_gbs / device.peak_bandwidth_gbs * 100.0


def feature_vector(config: GemmConfig) -> list[float]:
    ch = compute_gemm_characteristics(config)
    return [
        float(config.m), float(config.n), float(config.k),
        float(config.block_m), float(config.block_n), float(config.block_k), float(config.stages),
        float(config.alpha), float(config.beta),
        ch.mn, ch.mk, ch.nk, ch.mnk, ch.total_flops, ch.bytes_accessed, ch.arithmetic_intensity,
        float(LAYOUT_CODES[config.layout]),
        float(config.tile_size) if config.tile_size is not None else 0.0,
    ]


def feature_matrix(configs) -> np.ndarray:
    rows = [feature_vector(c) for c in configs]
    if not rows:
        return np.empty((0, len(FEATURE_ORDER)))
    return np.array(rows, dtype=np.float64)


def target_matrix(dataset: Dataset) -> np.ndarray:
    """Targets per record in TARGETS order; absent values become NaN."""
    out = np.empty((len(dataset), len(TARGETS)))
    for i, rec in enumerate(dataset.records):
        for j, name in enumerate(TARGETS):
            value = getattr(rec, name)
            out[i, j] = np.nan if value is None else value
    return out


def featurize(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Return (features n x 18, targets n x 4), rows aligned with the records."""
    if len(dataset) == 0:
        raise EmptyDataset("cannot featurize an empty dataset")
    return feature_matrix(r.config for r in dataset.records), target_matrix(dataset)


def naive_kernel_features(dataset: Dataset) -> np.ndarray:
    """(M, N, K, tile_size) columns used for the tiled-kernel linear baseline."""
    rows = []
    for rec in dataset.records:
        c = rec.config
        rows.append([c.m, c.n, c.k, 0 if c.tile_size is None else c.tile_size])
    return np.array(rows, dtype=np.float64).reshape(-1, 4)
