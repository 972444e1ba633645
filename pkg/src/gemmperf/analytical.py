"""Closed-form hardware models: roofline, occupancy, grid size, shared memory."""
from __future__ import annotations

from dataclasses import dataclass

from .core import DeviceModel
from .errors import NonPositiveIntensity, TileTooLarge

MEMORY_BOUND = "memory_bound"
COMPUTE_BOUND = "compute_bound"


@dataclass(frozen=True)
class RooflinePoint:
    arithmetic_intensity: float
    attainable_tflops: float
    regime: str
    ridge_point: float


@dataclass(frozen=True)
class OccupancyReport:
    tile_size: int
    threads_per_block: int
    shared_mem_bytes: int
    blocks_limit_threads: int
    blocks_limit_smem: int
    blocks_limit_hw: int
    max_active_blocks: int


def roofline(ai: float, device: DeviceModel = DeviceModel()) -> RooflinePoint:
    """Attainable TFLOP/s at arithmetic intensity ``ai`` (FLOPs/byte).

    A point exactly on the ridge counts as compute bound.
    """
    if not ai > 0:
        raise NonPositiveIntensity(f"arithmetic intensity must be positive, got {ai}")
    ridge = device.ridge_point
    memory_roof = ai * device.peak_bandwidth_gbs / 1000.0
    regime = MEMORY_BOUND if ai < ridge else COMPUTE_BOUND
    attainable = device.peak_tflops if regime == COMPUTE_BOUND else min(device.peak_tflops, memory_roof)
    return RooflinePoint(float(ai), attainable, regime, ridge)


def effective_grid_size(m: int, n: int, tile_size: int) -> int:
    """Number of thread blocks covering an m x n output with square tiles."""
    if m < 1 or n < 1 or tile_size < 1:
        raise ValueError("m, n and tile_size must be positive")
    return (-(-m // tile_size)) * (-(-n // tile_size))


def shared_memory_usage(tile_size: int) -> int:
    """Bytes of shared memory per block: one A tile and one B tile of floats."""
    if tile_size < 1:
        raise ValueError("tile_size must be positive")
    return 2 * tile_size * tile_size * 4


def max_active_blocks(tile_size: int, device: DeviceModel = DeviceModel()) -> OccupancyReport:
    threads = tile_size * tile_size
    if tile_size < 1:
        raise ValueError("tile_size must be positive")
    if threads > device.max_threads_per_block:
        raise TileTooLarge(
            f"tile {tile_size} needs {threads} threads per block, limit is {device.max_threads_per_block}"
        )
    smem = shared_memory_usage(tile_size)
    by_threads = device.max_threads_per_sm // threads
    by_smem = device.shared_mem_per_sm_bytes // smem
    by_hw = device.max_blocks_per_sm
    return OccupancyReport(
        tile_size=tile_size,
        threads_per_block=threads,
        shared_mem_bytes=smem,
        blocks_limit_threads=by_threads,
        blocks_limit_smem=by_smem,
        blocks_limit_hw=by_hw,
        max_active_blocks=min(by_threads, by_smem, by_hw),
    )
