"""Predictors: linear baseline, CART trees, random forests, multi-output wrapper, ensembles."""
from .ensemble import EnsembleModel, calibrate_weights, ensemble_predict, uniform_ensemble
from .forest import ForestModel, fit_forest
from .linear import LinearModel, fit_linear
from .modelfile import FORMAT_VERSION, load_model, save_model
from .multi import MultiOutputModel, fit_multi_output, predict
from .tree import BACKEND, RegressionTree, fit_tree

__all__ = [
    "BACKEND", "FORMAT_VERSION", "EnsembleModel", "ForestModel", "LinearModel", "MultiOutputModel",
    "RegressionTree", "calibrate_weights", "ensemble_predict", "fit_forest", "fit_linear",
    "fit_multi_output", "fit_tree", "load_model", "predict", "save_model", "uniform_ensemble",
]
