"""Domain vocabulary: GEMM configurations, profile records, datasets, devices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

LAYOUTS = ("nn", "nt", "tn", "tt")
LAYOUT_CODES = {name: code for code, name in enumerate(LAYOUTS)}

MAX_TILE_SIZE = 32
ENERGY_CONSISTENCY_RTOL = 0.05

TARGETS = ("runtime_ms", "power_w", "energy_j", "tflops")


@dataclass(frozen=True)
class GemmConfig:
    """One GEMM workload: ``C = alpha * A @ B + beta * C`` with A (m x k), B (k x n).

    ``tile_size`` is only set for the naive tiled kernel; CUTLASS-style configs
    describe their tiling through ``block_m/n/k`` and ``stages`` instead.
    """

    m: int
    n: int
    k: int
    layout: str = "nn"
    block_m: int = 128
    block_n: int = 128
    block_k: int = 8
    stages: int = 2
    alpha: float = 1.0
    beta: float = 0.0
    kernel_name: str = ""
    tile_size: Optional[int] = None


@dataclass(frozen=True)
class ProfileRecord:
    """A measured or synthesized observation of one GEMM run.

    Absent telemetry is ``None``; after sanitization the target fields may also
    be ``None``.
    """

    config: GemmConfig
    runtime_ms: Optional[float]
    power_w: Optional[float]
    energy_j: Optional[float]
    tflops: Optional[float]
    temperature_c: Optional[float] = None
    gpu_util_pct: Optional[float] = None
    mem_util_pct: Optional[float] = None
    sm_clock_mhz: Optional[float] = None
    shared_memory_used: Optional[bool] = None
    mem_total_mb: Optional[float] = None
    mem_free_mb: Optional[float] = None
    mem_used_mb: Optional[float] = None

    def energy_consistent(self, rtol: float = ENERGY_CONSISTENCY_RTOL) -> bool:
        """True unless energy disagrees with power x runtime by more than ``rtol``.

        Records missing any of the three values, or with a zero among them,
        are not checkable and count as consistent.
        """
        r, p, e = self.runtime_ms, self.power_w, self.energy_j
        if r is None or p is None or e is None:
            return True
        if not (r > 0 and p > 0 and e > 0):
            return True
        return abs(e - p * r / 1000.0) / e <= rtol


@dataclass(frozen=True)
class Dataset:
    records: tuple = ()
    provenance: str = "measured"

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        if self.provenance not in ("measured", "synthetic"):
            raise ValueError(f"provenance must be 'measured' or 'synthetic', got {self.provenance!r}")

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, idx):
        return self.records[idx]

    def subset(self, indices) -> "Dataset":
        return Dataset([self.records[i] for i in indices], self.provenance)


@dataclass(frozen=True)
class DeviceModel:
    """Hardware limits. Defaults describe an RTX 4070 (Ada Lovelace, SM 8.9).

    ``num_sms`` is only used by the synthetic simulator to model how many SMs a
    launch keeps busy.
    """

    peak_bandwidth_gbs: float = 504.2
    peak_tflops: float = 29.15
    max_threads_per_sm: int = 1536
    max_blocks_per_sm: int = 24
    shared_mem_per_sm_bytes: int = 102400
    max_threads_per_block: int = 1024
    base_power_w: float = 80.0
    max_power_w: float = 200.0
    num_sms: int = 46

    def __post_init__(self):
        if not (self.peak_bandwidth_gbs > 0 and self.peak_tflops > 0):
            raise ValueError("peak bandwidth and peak TFLOPS must be positive")
        for name in ("max_threads_per_sm", "max_blocks_per_sm", "shared_mem_per_sm_bytes",
                     "max_threads_per_block", "num_sms"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.base_power_w < 0 or not self.max_power_w > self.base_power_w:
            raise ValueError("need 0 <= base_power_w < max_power_w")

    @property
    def ridge_point(self) -> float:
        """Arithmetic intensity (FLOPs/byte) where the two roofs meet."""
        return self.peak_tflops * 1000.0 / self.peak_bandwidth_gbs

    @classmethod
    def from_mapping(cls, values: dict) -> "DeviceModel":
        known = cls.__dataclass_fields__
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ValueError(f"unknown device parameter: {key}")
            typ = known[key].type
            kwargs[key] = int(raw) if typ == "int" else float(raw)
        return cls(**kwargs)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_config(config: GemmConfig) -> list[str]:
    """Return every violated invariant of ``config`` (empty list when valid)."""
    problems = []
    for name in ("m", "n", "k"):
        value = getattr(config, name)
        if not _is_int(value) or value < 1:
            problems.append(f"{name} >= 1")
    if config.layout not in LAYOUT_CODES:
        problems.append(f"layout in {{{', '.join(LAYOUTS)}}}")
    for name in ("block_m", "block_n", "block_k", "stages"):
        value = getattr(config, name)
        if not _is_int(value) or value < 1:
            problems.append(f"{name} >= 1")
    for name in ("alpha", "beta"):
        value = getattr(config, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{name} finite")
    if config.tile_size is not None:
        t = config.tile_size
        if not _is_int(t) or t < 1:
            problems.append("tile_size >= 1")
        elif t > MAX_TILE_SIZE:
            problems.append(f"tile_size <= {MAX_TILE_SIZE}")
    return problems
