"""Versioned, self-describing model files.

::

    gemm-perf-oracle-model v1
    <key>\t<json value>
    ...
    checksum\tsha256:<hex digest of every preceding line>

Floats are written with ``repr`` precision by ``json``, so loading restores
bit-identical parameters. Files contain no timestamps: fitting twice with the
same data and seed yields identical bytes.
"""
from __future__ import annotations

import hashlib
import json

from ..core import TARGETS
from ..errors import CorruptModel, VersionMismatch
from ..preprocess import PreprocessStats
from .multi import MultiOutputModel, model_from_dict

MAGIC = "gemm-perf-oracle-model"
FORMAT_VERSION = 1
HEADER = f"{MAGIC} v{FORMAT_VERSION}"


def _dumps(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False)


def render_model(model: MultiOutputModel) -> str:
    lines = [
        HEADER,
        f"format_version\t{FORMAT_VERSION}",
        f"feature_order\t{_dumps(list(model.feature_order))}",
        f"targets\t{_dumps(list(TARGETS))}",
        f"metadata\t{_dumps(model.metadata)}",
        f"preprocess_stats\t{_dumps(model.preprocess_stats.to_dict())}",
        f"target_stats\t{_dumps(model.target_stats.to_dict())}",
    ]
    for name in TARGETS:
        lines.append(f"model.{name}\t{_dumps(model.models[name].to_dict())}")
    body = "\n".join(lines) + "\n"
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + f"checksum\tsha256:{digest}\n"


def save_model(model: MultiOutputModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_model(model))


def parse_model(text: str) -> MultiOutputModel:
    first, _, _ = text.partition("\n")
    if not first.startswith(MAGIC + " "):
        raise CorruptModel("not a gemm-perf model file")
    if first != HEADER:
        raise VersionMismatch(f"unsupported model format {first[len(MAGIC) + 1:]!r}, expected v{FORMAT_VERSION}")
    if not text.endswith("\n"):
        raise CorruptModel("model file is truncated")
    body, sep, last = text[:-1].rpartition("\n")
    if not sep or not last.startswith("checksum\tsha256:"):
        raise CorruptModel("model file has no checksum line")
    body += "\n"
    expected = last.split(":", 1)[1]
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != expected:
        raise CorruptModel("checksum mismatch")
    entries = {}
    try:
        for line in body.splitlines()[1:]:
            key, value = line.split("\t", 1)
            entries[key] = json.loads(value)
        if entries["format_version"] != FORMAT_VERSION:
            raise VersionMismatch(f"unsupported format_version {entries['format_version']}")
        models = {name: model_from_dict(entries[f"model.{name}"]) for name in TARGETS}
        return MultiOutputModel(
            preprocess_stats=PreprocessStats.from_dict(entries["preprocess_stats"]),
            target_stats=PreprocessStats.from_dict(entries["target_stats"]),
            models=models,
            feature_order=tuple(entries["feature_order"]),
            metadata=entries["metadata"],
        )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, VersionMismatch):
            raise
        raise CorruptModel(f"malformed model file: {exc}") from None


def load_model(path) -> MultiOutputModel:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError:
        raise CorruptModel("model file is not UTF-8 text") from None
    return parse_model(text)
