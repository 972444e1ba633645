"""Deterministic synthetic GPU simulator with a known noiseless ground truth.

Runtime follows a roofline: the slower of the compute and memory terms plus a
fixed launch overhead. Power rises from the idle floor with the compute-busy
fraction and with the share of SMs that the launch's output tiles occupy.
Noise is multiplicative, bounded, and keyed by (seed, config) so every record
is reproducible on its own.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

import numpy as np

from .core import LAYOUTS, Dataset, DeviceModel, GemmConfig, ProfileRecord
from .errors import EmptyGrid
from .features import compute_gemm_characteristics, tflops_from_runtime

COMPUTE_EFFICIENCY = 0.7
MEMORY_EFFICIENCY = 0.8
LAUNCH_OVERHEAD_S = 5e-6
# efficiency multipliers; their product stays within +/-10%
LAYOUT_FACTOR = {"nn": 1.00, "nt": 0.97, "tn": 1.02, "tt": 0.95}
BLOCK_FACTOR = {(64, 64, 32): 0.98, (128, 64, 32): 1.03}
BUSY_FLOOR = 0.1

DEFAULT_DIMS = (256, 512, 1024, 2048)
DEFAULT_ALPHA_BETA = ((1.0, 0.0), (1.0, 1.0), (0.5, 0.5), (2.0, 0.0))
DEFAULT_BLOCKS = ((64, 64, 32), (128, 64, 32))


@dataclass(frozen=True)
class SynthSpec:
    m_values: tuple = DEFAULT_DIMS
    n_values: tuple = DEFAULT_DIMS
    k_values: tuple = DEFAULT_DIMS
    layouts: tuple = LAYOUTS
    alpha_beta: tuple = DEFAULT_ALPHA_BETA
    blocks: tuple = DEFAULT_BLOCKS
    stages: int = 2
    noise_fraction: float = 0.05
    seed: int = 0
    device: DeviceModel = DeviceModel()

    @property
    def size(self) -> int:
        return (len(self.m_values) * len(self.n_values) * len(self.k_values) * len(self.layouts)
                * len(self.alpha_beta) * len(self.blocks))


def efficiency_factor(config: GemmConfig) -> float:
    block = (config.block_m, config.block_n, config.block_k)
    return LAYOUT_FACTOR.get(config.layout, 1.0) * BLOCK_FACTOR.get(block, 1.0)


def config_key(config: GemmConfig) -> list[int]:
    """Stable 128-bit digest of a config as four 32-bit words."""
    text = "|".join(str(v) for v in (
        config.m, config.n, config.k, config.layout, config.block_m, config.block_n, config.block_k,
        config.stages, repr(float(config.alpha)), repr(float(config.beta)), config.kernel_name, config.tile_size,
    ))
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def noiseless_terms(config: GemmConfig, device: DeviceModel) -> dict:
    ch = compute_gemm_characteristics(config)
    factor = efficiency_factor(config)
    compute_s = ch.total_flops / (device.peak_tflops * 1e12 * COMPUTE_EFFICIENCY * factor)
    memory_s = ch.bytes_accessed / (device.peak_bandwidth_gbs * 1e9 * MEMORY_EFFICIENCY * factor)
    runtime_s = max(compute_s, memory_s) + LAUNCH_OVERHEAD_S
    busy = min(1.0, compute_s / runtime_s * 0.9 + BUSY_FLOOR)
    tiles = (-(-config.m // config.block_m)) * (-(-config.n // config.block_n))
    sm_active = min(1.0, tiles / device.num_sms)
    power_w = device.base_power_w + (device.max_power_w - device.base_power_w) * busy * sm_active
    return {"compute_s": compute_s, "memory_s": memory_s, "runtime_s": runtime_s,
            "busy": busy, "sm_active": sm_active, "power_w": power_w}


def synth_record(config: GemmConfig, spec: SynthSpec = SynthSpec()) -> ProfileRecord:
    terms = noiseless_terms(config, spec.device)
    runtime_s, power_w = terms["runtime_s"], terms["power_w"]
    if spec.noise_fraction:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed, *config_key(config)])))
        u_runtime, u_power = (float(u) for u in rng.uniform(-1.0, 1.0, size=2))
        runtime_s *= 1.0 + u_runtime * spec.noise_fraction
        power_w *= 1.0 + u_power * spec.noise_fraction
    runtime_ms = runtime_s * 1000.0
    return ProfileRecord(
        config=config,
        runtime_ms=runtime_ms,
        power_w=power_w,
        energy_j=power_w * runtime_s,
        tflops=tflops_from_runtime(config, runtime_ms),
        shared_memory_used=True,
    )


def grid_configs(spec: SynthSpec):
    """Configs in lexicographic order of (m, n, k, layout, alpha/beta, block)."""
    for m, n, k, layout, (alpha, beta), (bm, bn, bk) in itertools.product(
            spec.m_values, spec.n_values, spec.k_values, spec.layouts, spec.alpha_beta, spec.blocks):
        yield GemmConfig(
            m=m, n=n, k=k, layout=layout, block_m=bm, block_n=bn, block_k=bk, stages=spec.stages,
            alpha=float(alpha), beta=float(beta),
            kernel_name=f"cutlass_simt_sgemm_{bm}x{bn}_{bk}x{spec.stages}_{layout}_align1",
        )


def generate(spec: SynthSpec = SynthSpec()) -> Dataset:
    if spec.size == 0:
        raise EmptyGrid("every grid axis needs at least one value")
    return Dataset([synth_record(c, spec) for c in grid_configs(spec)], provenance="synthetic")


def describe(spec: SynthSpec) -> list[str]:
    """Comment lines recording the simulator constants, for CSV headers."""
    d = spec.device
    return [
        f"generator=gemmperf.synth seed={spec.seed} noise_fraction={spec.noise_fraction!r}",
        f"compute_efficiency={COMPUTE_EFFICIENCY} memory_efficiency={MEMORY_EFFICIENCY} "
        f"launch_overhead_s={LAUNCH_OVERHEAD_S}",
        "layout_factor=" + ",".join(f"{k}:{v}" for k, v in LAYOUT_FACTOR.items())
        + " block_factor=" + ",".join(f"{a}x{b}x{c}:{v}" for (a, b, c), v in BLOCK_FACTOR.items()),
        f"device peak_tflops={d.peak_tflops} peak_bandwidth_gbs={d.peak_bandwidth_gbs} "
        f"base_power_w={d.base_power_w} max_power_w={d.max_power_w} num_sms={d.num_sms}",
    ]
