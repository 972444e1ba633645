"""Profiling dataset CSV format and numeric sanitization.

Layout: a header row naming the columns (any order), then one row per
observation. Empty cells mean "absent". Lines starting with ``#`` before the
header are comments; ``# provenance=synthetic`` marks generated data.
"""
from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path

from .core import Dataset, GemmConfig, ProfileRecord
from .errors import MissingColumn, RowParseError, UnknownColumn

CONFIG_COLUMNS = ("m", "n", "k", "layout", "block_m", "block_n", "block_k", "stages",
                  "alpha", "beta", "kernel_name")
TARGET_COLUMNS = ("runtime_ms", "power_w", "energy_j", "tflops")
REQUIRED_COLUMNS = CONFIG_COLUMNS + TARGET_COLUMNS
OPTIONAL_COLUMNS = ("tile_size", "temperature_c", "gpu_util_pct", "mem_util_pct", "sm_clock_mhz",
                    "shared_memory_used", "mem_total_mb", "mem_free_mb", "mem_used_mb")
ALL_COLUMNS = REQUIRED_COLUMNS + OPTIONAL_COLUMNS

_INT_COLUMNS = {"m", "n", "k", "block_m", "block_n", "block_k", "stages", "tile_size"}
_CONFIG_FIELDS = set(CONFIG_COLUMNS) | {"tile_size"}
# columns that may hold the missing marker
NUMERIC_COLUMNS = TARGET_COLUMNS + tuple(c for c in OPTIONAL_COLUMNS
                                         if c not in ("tile_size", "shared_memory_used"))

_TRUE = {"true", "1"}
_FALSE = {"false", "0"}


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):  # includes np.float64
        return repr(float(value))
    return str(value)


def _parse_int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        as_float = float(token)
        if not as_float.is_integer():
            raise
        return int(as_float)


def _parse_bool(token: str) -> bool:
    low = token.strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(token)


def _parse_optional(name: str, token: str):
    token = token.strip()
    if token == "":
        return None
    try:
        if name == "shared_memory_used":
            return _parse_bool(token)
        if name == "tile_size":
            return _parse_int(token)
        value = float(token)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _parse_row(row: dict, line: int) -> ProfileRecord:
    cfg = {}
    for name in CONFIG_COLUMNS:
        token = row[name]
        if name in ("layout", "kernel_name"):
            cfg[name] = token.strip()
            continue
        try:
            cfg[name] = _parse_int(token) if name in _INT_COLUMNS else float(token)
        except ValueError:
            raise RowParseError(line, name, token) from None
    extras = {name: _parse_optional(name, row[name]) for name in OPTIONAL_COLUMNS if name in row}
    tile = extras.pop("tile_size", None)
    targets = {}
    for name in TARGET_COLUMNS:
        token = row[name].strip()
        if token == "":
            targets[name] = None
            continue
        try:
            targets[name] = float(token)
        except ValueError:
            raise RowParseError(line, name, row[name]) from None
    return ProfileRecord(config=GemmConfig(tile_size=tile, **cfg), **targets, **extras)


def load_dataset(path) -> Dataset:
    """Read a profiling CSV. Row order is preserved."""
    provenance = "measured"
    with open(path, newline="", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    n_comments = 0
    for text in lines:
        if not text.startswith("#"):
            break
        n_comments += 1
        body = text[1:].strip()
        if body.startswith("provenance="):
            provenance = body.split("=", 1)[1].strip()
    reader = csv.reader(lines[n_comments:])
    header = next(reader, None)
    if header is None:
        raise MissingColumn(REQUIRED_COLUMNS[0])
    header = [h.strip() for h in header]
    for name in REQUIRED_COLUMNS:
        if name not in header:
            raise MissingColumn(name)
    records = []
    for offset, cells in enumerate(reader):
        line = n_comments + 2 + offset
        if not cells or all(c.strip() == "" for c in cells):
            continue
        if len(cells) != len(header):
            raise RowParseError(line, "*", ",".join(cells))
        records.append(_parse_row(dict(zip(header, cells)), line))
    return Dataset(records, provenance)


def record_to_row(record: ProfileRecord) -> list[str]:
    values = []
    for name in ALL_COLUMNS:
        if name in _CONFIG_FIELDS:
            values.append(format_value(getattr(record.config, name)))
        else:
            values.append(format_value(getattr(record, name)))
    return values


def write_dataset(dataset: Dataset, fh, comments=()) -> None:
    """Write ``dataset`` as CSV with every schema column to an open text stream.

    Floats use ``repr`` (shortest string that parses back exactly).
    """
    if dataset.provenance != "measured" or comments:
        fh.write(f"# provenance={dataset.provenance}\n")
        for text in comments:
            fh.write(f"# {text}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(ALL_COLUMNS)
    for record in dataset.records:
        writer.writerow(record_to_row(record))


def save_dataset(dataset: Dataset, path, comments=()) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_dataset(dataset, fh, comments)


def sanitize_numeric(dataset: Dataset, columns=NUMERIC_COLUMNS) -> Dataset:
    """Replace non-finite values (NaN, +/-inf) in ``columns`` with ``None``."""
    columns = tuple(columns)
    for name in columns:
        if name not in ALL_COLUMNS:
            raise UnknownColumn(name)
    # config fields cannot be absent; validate_config reports non-finite alpha/beta
    record_cols = [c for c in columns if c not in _CONFIG_FIELDS and c != "shared_memory_used"]
    out = []
    for record in dataset.records:
        changes = {}
        for name in record_cols:
            value = getattr(record, name)
            if value is not None and not math.isfinite(value):
                changes[name] = None
        out.append(dataclasses.replace(record, **changes) if changes else record)
    return Dataset(out, dataset.provenance)


def write_rows(path, header, rows) -> None:
    """Small helper for the debug CSV outputs (features, reports)."""
    target = Path(path)
    with open(target, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
