import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from gemmperf.learn.tree import BACKEND, KERNELS, RegressionTree, fit_tree
from oracles import brute_force_tree, nested_equal, tree_to_nested


@pytest.mark.parametrize("seed", range(10))
def test_matches_brute_force_depth2(seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 10, size=(20, 3))
    y = rng.normal(size=20)
    tree = fit_tree(X, y, max_depth=2)
    assert nested_equal(tree_to_nested(tree), brute_force_tree(X, y, 2))


@pytest.mark.parametrize("seed", range(5))
def test_matches_brute_force_with_repeated_values(seed):
    rng = np.random.default_rng(100 + seed)
    X = rng.integers(0, 4, size=(20, 2)).astype(float)
    y = X[:, 0] * 3 + rng.normal(scale=0.1, size=20)
    tree = fit_tree(X, y, max_depth=3)
    assert nested_equal(tree_to_nested(tree), brute_force_tree(X, y, 3))


def test_separable_split():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    tree = fit_tree(X, [10.0, 10.0, 20.0, 20.0], max_depth=1)
    assert tree.feature[0] == 0 and tree.threshold[0] == 2.5
    assert tree.predict(X).tolist() == [10.0, 10.0, 20.0, 20.0]


def test_single_sample_is_leaf():
    tree = fit_tree([[3.0, 4.0]], [7.5])
    assert tree.n_nodes == 1 and tree.predict([[0.0, 0.0]]).tolist() == [7.5]


def test_constant_target_is_leaf():
    tree = fit_tree(np.arange(10.0)[:, None], np.full(10, 0.25))
    assert tree.n_nodes == 1 and tree.value[0] == 0.25


def test_depth_limit():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(200, 4)), rng.normal(size=200)
    for d in (0, 1, 3, 5):
        assert fit_tree(X, y, max_depth=d).depth() <= d


def test_unlimited_depth_interpolates_distinct_rows():
    rng = np.random.default_rng(1)
    X, y = rng.normal(size=(60, 3)), rng.normal(size=60)
    tree = fit_tree(X, y)
    assert np.array_equal(tree.predict(X), y)


def test_leaf_means_reproduce_target_sum():
    rng = np.random.default_rng(2)
    X, y = rng.normal(size=(100, 3)), rng.normal(size=100)
    tree = fit_tree(X, y, max_depth=4)
    leaves = tree.is_leaf
    total = float(np.sum(tree.value[leaves] * tree.n_samples[leaves]))
    assert total == pytest.approx(float(np.sum(y)), abs=1e-9)


def test_predictions_within_target_range():
    rng = np.random.default_rng(3)
    X, y = rng.normal(size=(80, 2)), rng.normal(size=80)
    pred = fit_tree(X, y, max_depth=3).predict(rng.normal(size=(500, 2)) * 10)
    assert pred.min() >= y.min() and pred.max() <= y.max()


def test_monotone_rescaling_keeps_partition():
    rng = np.random.default_rng(4)
    X, y = rng.uniform(1, 5, size=(50, 3)), rng.normal(size=50)
    a = fit_tree(X, y, max_depth=4)
    b = fit_tree(np.exp(X), y, max_depth=4)
    assert np.array_equal(a.feature, b.feature)
    assert np.array_equal(a.n_samples, b.n_samples)
    assert np.array_equal(a.predict(X), b.predict(np.exp(X)))


def test_dict_round_trip():
    rng = np.random.default_rng(5)
    tree = fit_tree(rng.normal(size=(30, 2)), rng.normal(size=30), max_depth=3)
    assert RegressionTree.from_dict(tree.to_dict()).same_as(tree)


@pytest.mark.skipif("cython" not in KERNELS, reason="compiled kernel not built")
@settings(max_examples=60, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 40), st.integers(1, 4)),
                  elements=st.sampled_from([0.0, 0.5, 1.0, 2.0, -3.0, 7.25])),
       st.integers(0, 2**32 - 1), st.sampled_from([None, 1, 2, 5]))
def test_backends_bit_identical(X, seed, depth):
    y = np.random.default_rng(seed).normal(size=X.shape[0])
    a = fit_tree(X, y, max_depth=depth, kernel="python")
    b = fit_tree(X, y, max_depth=depth, kernel="cython")
    assert a.same_as(b)
    assert np.array_equal(a.predict(X), b.predict(X, kernel="cython"))


def test_backend_name():
    assert BACKEND in KERNELS
