"""Multi-output predictor: cleaning + scaling shared, one base model per target."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import __version__
from ..core import TARGETS, Dataset, validate_config
from ..errors import EmptyDataset, InvalidConfig, ModelFeatureMismatch
from ..features import CATEGORICAL_FEATURES, FEATURE_ORDER, NUMERIC_FEATURES, feature_matrix, featurize
from ..ingest import sanitize_numeric
from ..preprocess import PreprocessStats, clean_columns, standardize
from .forest import BOOTSTRAP_GENERATOR, ForestModel, fit_forest
from .linear import LinearModel, fit_linear

BASES = ("forest", "linear")
_NUMERIC_IDX = [FEATURE_ORDER.index(f) for f in NUMERIC_FEATURES]
_CATEGORICAL_IDX = [FEATURE_ORDER.index(f) for f in CATEGORICAL_FEATURES]


@dataclass(frozen=True, eq=False)
class MultiOutputModel:
    preprocess_stats: PreprocessStats
    target_stats: PreprocessStats
    models: dict
    feature_order: tuple = FEATURE_ORDER
    metadata: dict = field(default_factory=dict)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Clip and scale a raw feature matrix with the stored statistics."""
        if tuple(self.feature_order) != FEATURE_ORDER:
            raise ModelFeatureMismatch(
                f"model expects features {list(self.feature_order)}, this build produces {list(FEATURE_ORDER)}"
            )
        return _transform(X, self.preprocess_stats)

    def predict_matrix(self, configs) -> np.ndarray:
        configs = list(configs)
        for cfg in configs:
            problems = validate_config(cfg)
            if problems:
                raise InvalidConfig(f"invalid config {cfg}: {', '.join(problems)}")
        Z = self.transform(feature_matrix(configs))
        out = np.empty((len(configs), len(TARGETS)))
        for j, name in enumerate(TARGETS):
            out[:, j] = self.models[name].predict(Z) if configs else np.empty(0)
        return out


def _transform(X: np.ndarray, stats: PreprocessStats) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    numeric, _ = clean_columns(X[:, _NUMERIC_IDX], NUMERIC_FEATURES, stats)
    scaled, _ = standardize(numeric, stats)
    out = np.empty_like(X)
    out[:, _NUMERIC_IDX] = scaled
    out[:, _CATEGORICAL_IDX] = X[:, _CATEGORICAL_IDX]
    return out


def prepare_training_data(train: Dataset):
    """Sanitize, derive characteristics, clip + impute, encode, scale.

    Returns ``(Z, Y, feature_stats, target_stats)``. Targets are cleaned like
    features but never scaled.
    """
    if len(train) == 0:
        raise EmptyDataset("training set is empty")
    X, Y = featurize(sanitize_numeric(train))
    numeric, feature_stats = clean_columns(X[:, _NUMERIC_IDX], NUMERIC_FEATURES)
    Y, target_stats = clean_columns(Y, TARGETS)
    scaled, _ = standardize(numeric, feature_stats)
    Z = np.empty_like(X)
    Z[:, _NUMERIC_IDX] = scaled
    Z[:, _CATEGORICAL_IDX] = X[:, _CATEGORICAL_IDX]
    return Z, Y, feature_stats, target_stats


def fit_multi_output(train: Dataset, base: str = "forest", n_estimators: int = 100, max_depth=6,
                     seed: int = 0, n_jobs=-1, extra_metadata=None) -> MultiOutputModel:
    """Fit one independent base model per target on the cleaned training set."""
    if base not in BASES:
        raise ValueError(f"base must be one of {BASES}, got {base!r}")
    Z, Y, feature_stats, target_stats = prepare_training_data(train)
    models = {}
    for j, name in enumerate(TARGETS):
        if base == "forest":
            models[name] = fit_forest(Z, Y[:, j], n_estimators=n_estimators, max_depth=max_depth,
                                      seed=seed, n_jobs=n_jobs)
        else:
            models[name] = fit_linear(Z, Y[:, j])
    metadata = {
        "base": base,
        "seed": seed,
        "n_train": len(train),
        "package_version": __version__,
    }
    if base == "forest":
        metadata.update(n_estimators=n_estimators, max_depth=max_depth, bootstrap_generator=BOOTSTRAP_GENERATOR)
    else:
        metadata["ridge_fallback"] = {name: models[name].ridge_used for name in TARGETS}
    metadata.update(extra_metadata or {})
    return MultiOutputModel(feature_stats, target_stats, models, FEATURE_ORDER, metadata)


def predict(model, configs) -> list[dict]:
    """Per-config dicts of the four predicted targets."""
    mat = model.predict_matrix(configs)
    return [dict(zip(TARGETS, (float(v) for v in row))) for row in mat]


def model_from_dict(data: dict):
    kind = data["kind"]
    if kind == "forest":
        return ForestModel.from_dict(data)
    if kind == "linear":
        return LinearModel.from_dict(data)
    raise ValueError(f"unknown base model kind {kind!r}")
