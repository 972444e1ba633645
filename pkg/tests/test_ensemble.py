import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemmperf.core import GemmConfig
from gemmperf.errors import WeightSumInvalid
from gemmperf.learn.ensemble import (EnsembleModel, calibrate_weights, ensemble_predict, simplex_least_squares,
                                     uniform_ensemble)
from gemmperf.learn.multi import fit_multi_output
from gemmperf.synth import SynthSpec, generate


class Const:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def predict_matrix(self, configs):
        return np.tile(self.values, (len(list(configs)), 1))


CFGS = [GemmConfig(m=8, n=8, k=8), GemmConfig(m=64, n=32, k=16)]


def test_single_member_identity():
    a = Const([1.0, 2.0, 3.0, 4.0])
    out = EnsembleModel([a], [1.0]).predict_matrix(CFGS)
    assert np.array_equal(out, a.predict_matrix(CFGS))


def test_equal_weights_mean():
    a, b = Const([1.0, 2.0, 3.0, 4.0]), Const([3.0, 6.0, 9.0, 12.0])
    out = uniform_ensemble([a, b]).predict_matrix(CFGS)
    assert out[0].tolist() == [2.0, 4.0, 6.0, 8.0]


def test_one_zero_weights():
    a, b = Const([1.5, 2.0, 3.0, 4.0]), Const([9.0, 9.0, 9.0, 9.0])
    out = EnsembleModel([a, b], [1.0, 0.0]).predict_matrix(CFGS)
    assert np.array_equal(out, a.predict_matrix(CFGS))


def test_dict_output():
    rows = ensemble_predict(uniform_ensemble([Const([1.0, 2.0, 3.0, 4.0])]), CFGS[:1])
    assert rows == [{"runtime_ms": 1.0, "power_w": 2.0, "energy_j": 3.0, "tflops": 4.0}]


@pytest.mark.parametrize("weights", [[0.5, 0.6], [1.2, -0.2], [0.3], [np.nan, 1.0]])
def test_invalid_weights(weights):
    with pytest.raises(WeightSumInvalid):
        EnsembleModel([Const([0] * 4), Const([0] * 4)], weights)


def test_no_members():
    with pytest.raises(WeightSumInvalid):
        EnsembleModel([], np.zeros((0, 4)))


def test_simplex_recovers_exact_mixture():
    rng = np.random.default_rng(0)
    P = rng.normal(size=(80, 3))
    w_true = np.array([0.2, 0.0, 0.8])
    w = simplex_least_squares(P, P @ w_true)
    assert np.allclose(w, w_true, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_simplex_feasible_and_no_worse_than_vertices(seed, k):
    rng = np.random.default_rng(seed)
    P, y = rng.normal(size=(30, k)), rng.normal(size=30)
    w = simplex_least_squares(P, y)
    assert (w >= 0).all() and abs(w.sum() - 1) <= 1e-9
    best_vertex = min(np.sum((P[:, i] - y) ** 2) for i in range(k))
    assert np.sum((P @ w - y) ** 2) <= best_vertex + 1e-9


def test_calibrated_ensemble_no_worse_on_validation():
    ds = generate(SynthSpec(m_values=(128, 1024), n_values=(128, 1024), k_values=(256, 2048),
                            alpha_beta=((1.0, 0.0),), seed=2))
    members = [fit_multi_output(ds, base="forest", n_estimators=5, seed=1), fit_multi_output(ds, base="linear")]
    ens = calibrate_weights(members, ds)
    configs = [r.config for r in ds]
    actual = np.array([r.runtime_ms for r in ds])
    err = lambda p: np.sum((p[:, 0] - actual) ** 2)
    assert err(ens.predict_matrix(configs)) <= min(err(m.predict_matrix(configs)) for m in members) + 1e-9
