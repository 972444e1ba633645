import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemmperf.core import DeviceModel, GemmConfig
from gemmperf.errors import EmptyGrid
from gemmperf.evaluate import mse, r2_score
from gemmperf.features import compute_gemm_characteristics
from gemmperf.ingest import save_dataset
from gemmperf.synth import (COMPUTE_EFFICIENCY, LAUNCH_OVERHEAD_S, MEMORY_EFFICIENCY, SynthSpec, describe, generate,
                            noiseless_terms, synth_record)

QUIET = SynthSpec(noise_fraction=0.0)
DEV = DeviceModel()


def test_compute_dominated():
    cfg = GemmConfig(m=4096, n=4096, k=4096)
    rec = synth_record(cfg, QUIET)
    expect = compute_gemm_characteristics(cfg).total_flops / (DEV.peak_tflops * 1e12 * COMPUTE_EFFICIENCY)
    assert abs(rec.runtime_ms / 1000 - (expect + LAUNCH_OVERHEAD_S)) <= 1e-9


def test_memory_dominated():
    cfg = GemmConfig(m=8, n=8, k=8)
    terms = noiseless_terms(cfg, DEV)
    assert terms["memory_s"] > terms["compute_s"]
    expect = compute_gemm_characteristics(cfg).bytes_accessed / (DEV.peak_bandwidth_gbs * 1e9 * MEMORY_EFFICIENCY)
    assert synth_record(cfg, QUIET).runtime_ms / 1000 == pytest.approx(expect + LAUNCH_OVERHEAD_S, rel=1e-12)


def test_deterministic_record():
    cfg = GemmConfig(m=300, n=200, k=100, layout="tt")
    spec = SynthSpec(seed=4)
    assert synth_record(cfg, spec) == synth_record(cfg, spec)
    assert synth_record(cfg, spec) != synth_record(cfg, SynthSpec(seed=5))


def test_energy_is_power_times_runtime():
    rec = synth_record(GemmConfig(m=512, n=256, k=128), QUIET)
    assert rec.energy_j == rec.power_w * (rec.runtime_ms / 1000.0)


def test_default_grid_count(synth_default):
    assert len(synth_default) == 2048 == SynthSpec().size
    assert synth_default.provenance == "synthetic"


def test_lexicographic_order(synth_default):
    keys = [(r.config.m, r.config.n, r.config.k) for r in synth_default]
    assert keys == sorted(keys)


def test_empty_grid():
    with pytest.raises(EmptyGrid):
        generate(SynthSpec(m_values=()))


def test_byte_identical_csv(tmp_path):
    spec = SynthSpec(m_values=(64, 128), n_values=(64,), k_values=(32, 64), seed=9)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    save_dataset(generate(spec), a, comments=describe(spec))
    save_dataset(generate(spec), b, comments=describe(spec))
    assert a.read_bytes() == b.read_bytes()


@settings(max_examples=200)
@given(st.integers(1, 4096), st.integers(1, 4096), st.integers(1, 4096), st.sampled_from(["m", "n", "k"]),
       st.sampled_from(["nn", "nt", "tn", "tt"]))
def test_runtime_monotone(m, n, k, axis, layout):
    base = GemmConfig(m=m, n=n, k=k, layout=layout)
    bigger = GemmConfig(**{**base.__dict__, axis: getattr(base, axis) + 1})
    assert synth_record(bigger, QUIET).runtime_ms >= synth_record(base, QUIET).runtime_ms


@settings(max_examples=200)
@given(st.integers(1, 8192), st.integers(1, 8192), st.integers(1, 8192), st.floats(0, 0.5), st.integers(0, 999))
def test_power_bounds(m, n, k, noise, seed):
    rec = synth_record(GemmConfig(m=m, n=n, k=k), SynthSpec(noise_fraction=noise, seed=seed))
    assert DEV.base_power_w * (1 - noise) - 1e-9 <= rec.power_w <= DEV.max_power_w * (1 + noise) + 1e-9


def test_noiseless_is_exact_oracle(synth_noiseless):
    stored = np.array([r.runtime_ms for r in synth_noiseless])
    recomputed = np.array([synth_record(r.config, QUIET).runtime_ms for r in synth_noiseless])
    assert r2_score(stored, recomputed) == 1.0 and mse(stored, recomputed) == 0.0


def test_noise_bounded(synth_default, synth_noiseless):
    ratio = np.array([a.runtime_ms / b.runtime_ms for a, b in zip(synth_default, synth_noiseless)])
    assert (np.abs(ratio - 1) <= 0.05 + 1e-12).all()
    assert np.ptp(ratio) > 0
