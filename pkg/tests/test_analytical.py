import pytest
from hypothesis import given
from hypothesis import strategies as st

from gemmperf.analytical import (COMPUTE_BOUND, MEMORY_BOUND, effective_grid_size, max_active_blocks, roofline,
                                 shared_memory_usage)
from gemmperf.core import DeviceModel
from gemmperf.errors import NonPositiveIntensity, TileTooLarge


def test_roofline_memory_bound():
    p = roofline(10.0)
    assert p.attainable_tflops == pytest.approx(5.042, abs=1e-6)
    assert p.regime == MEMORY_BOUND


def test_roofline_compute_bound():
    p = roofline(100.0)
    assert p.attainable_tflops == 29.15 and p.regime == COMPUTE_BOUND


def test_roofline_ridge_tie_is_compute_bound():
    dev = DeviceModel()
    p = roofline(dev.ridge_point, dev)
    assert p.regime == COMPUTE_BOUND and p.attainable_tflops == dev.peak_tflops


def test_roofline_rejects_nonpositive():
    with pytest.raises(NonPositiveIntensity):
        roofline(0.0)


@given(st.floats(1e-3, 1e4), st.floats(1e-3, 1e4))
def test_roofline_monotone(a, b):
    lo, hi = sorted((a, b))
    p_lo, p_hi = roofline(lo), roofline(hi)
    assert p_lo.attainable_tflops <= p_hi.attainable_tflops <= 29.15
    assert (p_lo.regime == MEMORY_BOUND) == (lo < DeviceModel().ridge_point)


def test_grid_size_examples():
    assert effective_grid_size(1000, 1000, 16) == 3969
    assert effective_grid_size(16, 16, 16) == 1
    assert effective_grid_size(17, 16, 16) == 2


@given(st.integers(1, 5000), st.integers(1, 5000), st.integers(1, 64))
def test_grid_covers_output(m, n, t):
    g = effective_grid_size(m, n, t)
    assert g * t * t >= m * n
    assert (g * t * t == m * n) == (m % t == 0 and n % t == 0)


@pytest.mark.parametrize("tile,expected", [(1, 8), (16, 2048), (32, 8192)])
def test_shared_memory(tile, expected):
    assert shared_memory_usage(tile) == expected


@pytest.mark.parametrize("tile,expected", [(1, 24), (4, 24), (8, 24), (16, 6), (32, 1)])
def test_occupancy_table(tile, expected):
    rep = max_active_blocks(tile)
    assert rep.max_active_blocks == expected
    assert rep.max_active_blocks == min(rep.blocks_limit_threads, rep.blocks_limit_smem, rep.blocks_limit_hw)
    assert rep.shared_mem_bytes == 2 * tile * tile * 4


def test_occupancy_limits_for_16():
    rep = max_active_blocks(16)
    assert (rep.blocks_limit_threads, rep.blocks_limit_smem, rep.blocks_limit_hw) == (6, 50, 24)


def test_occupancy_non_increasing():
    values = [max_active_blocks(t).max_active_blocks for t in range(1, 33)]
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_tile_too_large():
    with pytest.raises(TileTooLarge):
        max_active_blocks(33)


def test_smem_limit_can_bind():
    dev = DeviceModel(shared_mem_per_sm_bytes=4096)
    assert max_active_blocks(16, dev).max_active_blocks == 2
