import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemmperf.core import Dataset, GemmConfig, ProfileRecord
from gemmperf.errors import MissingColumn, RowParseError, UnknownColumn
from gemmperf.ingest import REQUIRED_COLUMNS, load_dataset, sanitize_numeric, save_dataset
from gemmperf.synth import SynthSpec, generate

HEADER = ",".join(REQUIRED_COLUMNS)
ROW = "512,512,1024,nn,128,128,8,2,1.0,0.0,sgemm_x,1.25,95.0,0.000119,1.718"


def _write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_single_row(tmp_path):
    ds = load_dataset(_write(tmp_path, HEADER + "\n" + ROW + "\n"))
    assert len(ds) == 1
    rec = ds[0]
    assert rec.runtime_ms == 1.25
    assert rec.config == GemmConfig(m=512, n=512, k=1024, layout="nn", block_m=128, block_n=128, block_k=8,
                                    stages=2, alpha=1.0, beta=0.0, kernel_name="sgemm_x")
    assert rec.temperature_c is None


def test_missing_required_column(tmp_path):
    header = HEADER.replace("power_w,", "")
    row = ROW.replace("95.0,", "")
    with pytest.raises(MissingColumn) as err:
        load_dataset(_write(tmp_path, header + "\n" + row + "\n"))
    assert err.value.name == "power_w"


def test_optional_nan_becomes_absent(tmp_path):
    ds = load_dataset(_write(tmp_path, HEADER + ",temperature_c\n" + ROW + ",NaN\n"))
    assert ds[0].temperature_c is None


def test_columns_in_any_order(tmp_path):
    cols = list(REQUIRED_COLUMNS)
    vals = ROW.split(",")
    text = ",".join(reversed(cols)) + "\n" + ",".join(reversed(vals)) + "\n"
    assert load_dataset(_write(tmp_path, text))[0].runtime_ms == 1.25


def test_malformed_required_token(tmp_path):
    with pytest.raises(RowParseError) as err:
        load_dataset(_write(tmp_path, HEADER + "\n" + ROW.replace("1.25", "fast") + "\n"))
    assert err.value.line == 2 and err.value.column == "runtime_ms"


def test_malformed_optional_token_is_missing(tmp_path):
    ds = load_dataset(_write(tmp_path, HEADER + ",gpu_util_pct,shared_memory_used\n" + ROW + ",abc,1\n"))
    assert ds[0].gpu_util_pct is None and ds[0].shared_memory_used is True


@pytest.mark.parametrize("token,expected", [("true", True), ("false", False), ("1", True), ("0", False)])
def test_boolean_tokens(tmp_path, token, expected):
    ds = load_dataset(_write(tmp_path, HEADER + ",shared_memory_used\n" + ROW + f",{token}\n"))
    assert ds[0].shared_memory_used is expected


def test_row_order_preserved(tmp_path):
    rows = [ROW.replace("512,512,1024", f"{m},8,8", 1) for m in (5, 3, 9, 1)]
    ds = load_dataset(_write(tmp_path, HEADER + "\n" + "\n".join(rows) + "\n"))
    assert [r.config.m for r in ds] == [5, 3, 9, 1]


def test_empty_dataset_writes_header_only(tmp_path):
    p = tmp_path / "e.csv"
    save_dataset(Dataset([]), p)
    assert len(p.read_text().splitlines()) == 1
    assert len(load_dataset(p)) == 0


def test_one_record_two_lines(tmp_path):
    ds = load_dataset(_write(tmp_path, HEADER + "\n" + ROW + "\n"))
    p = tmp_path / "o.csv"
    save_dataset(ds, p)
    assert len(p.read_text().splitlines()) == 2


def _rel_close(a, b, rtol=1e-9):
    if a is None or b is None:
        return a is b
    if isinstance(a, float) and math.isnan(a):
        return math.isnan(b)
    return abs(a - b) <= rtol * max(abs(a), abs(b)) if isinstance(a, float) else a == b


def test_synthetic_round_trip(tmp_path):
    ds = generate(SynthSpec(m_values=(64, 128, 256, 512, 1024), n_values=(128, 256), k_values=(256, 512, 1024, 2048, 4096),
                            layouts=("nn", "tt"), alpha_beta=((1.0, 0.0),), blocks=((64, 64, 32),), seed=3))
    assert len(ds) == 100
    p = tmp_path / "s.csv"
    save_dataset(ds, p)
    back = load_dataset(p)
    assert back.provenance == "synthetic"
    assert len(back) == len(ds)
    for a, b in zip(ds, back):
        assert a.config == b.config
        for field in ("runtime_ms", "power_w", "energy_j", "tflops", "temperature_c", "shared_memory_used"):
            assert _rel_close(getattr(a, field), getattr(b, field))


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
maybe = st.one_of(st.none(), finite)


@settings(max_examples=200)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 10**6), st.sampled_from(["nn", "nt", "tn", "tt"]),
       finite, finite, st.one_of(st.none(), st.integers(1, 32)), finite, finite, finite, finite,
       maybe, maybe, st.one_of(st.none(), st.booleans()), st.text("abc_xyz019", max_size=12))
def test_render_parse_identity(tmp_path_factory, m, n, k, layout, alpha, beta, tile, r, p, e, t, temp, clk, smem, name):
    rec = ProfileRecord(GemmConfig(m=m, n=n, k=k, layout=layout, alpha=alpha, beta=beta, tile_size=tile,
                                   kernel_name=name), r, p, e, t, temperature_c=temp, sm_clock_mhz=clk,
                        shared_memory_used=smem)
    path = tmp_path_factory.mktemp("rt") / "r.csv"
    save_dataset(Dataset([rec]), path)
    assert load_dataset(path)[0] == rec


def _dataset_with(values, column="runtime_ms"):
    recs = []
    for v in values:
        kw = {"runtime_ms": 1.0, "power_w": 100.0, "energy_j": 0.1, "tflops": 1.0}
        kw[column] = v
        recs.append(ProfileRecord(GemmConfig(m=2, n=2, k=2), **kw))
    return Dataset(recs)


def test_sanitize_infinite_runtime():
    out = sanitize_numeric(_dataset_with([float("inf")]))
    assert out[0].runtime_ms is None


def test_sanitize_identity_on_finite():
    ds = _dataset_with([1.0, 2.0, 3.0])
    assert sanitize_numeric(ds) == ds


def test_sanitize_counts():
    nan = float("nan")
    vals = [1.0, nan, 3.0, 4.0, nan, 6.0, 7.0, nan, 9.0, 10.0]
    out = sanitize_numeric(_dataset_with(vals), ["runtime_ms"])
    got = [r.runtime_ms for r in out]
    assert sum(v is None for v in got) == 3
    assert [v for v in got if v is not None] == [1.0, 3.0, 4.0, 6.0, 7.0, 9.0, 10.0]


def test_sanitize_unknown_column():
    with pytest.raises(UnknownColumn):
        sanitize_numeric(_dataset_with([1.0]), ["bogus"])


@given(st.lists(st.one_of(finite, st.just(float("nan")), st.just(float("inf")), st.just(float("-inf"))),
                min_size=1, max_size=20))
def test_sanitize_idempotent(values):
    once = sanitize_numeric(_dataset_with(values))
    assert sanitize_numeric(once) == once
    assert all(r.runtime_ms is None or math.isfinite(r.runtime_ms) for r in once)


def test_sanitized_dataset_round_trips(tmp_path):
    ds = sanitize_numeric(_dataset_with([1.0, float("nan")]))
    p = tmp_path / "s.csv"
    save_dataset(ds, p)
    assert load_dataset(p) == ds
