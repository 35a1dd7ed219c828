import numpy as np
import pytest

from superlime.lasso import (
    WeightedKLasso,
    ZeroSignalError,
    lasso_coordinate_descent,
    select_k_features,
    soft_threshold,
    weighted_least_squares,
)


def orthonormal_design(rng, n, p):
    """Columns orthonormal and orthogonal to the intercept column."""
    raw = np.hstack([np.ones((n, 1)), rng.normal(size=(n, p))])
    q, _ = np.linalg.qr(raw)
    return q[:, 1:] * np.sqrt(1.0)  # unit weighted norm with weights = 1


def test_soft_threshold():
    assert soft_threshold(3.0, 1.0) == 2.0
    assert soft_threshold(-3.0, 1.0) == -2.0
    assert soft_threshold(0.4, 1.0) == 0.0
    assert np.array_equal(soft_threshold(np.array([2.0, -0.5]), 1.0), [1.0, 0.0])


@pytest.mark.parametrize("seed", range(20))
def test_coordinate_descent_matches_soft_threshold_on_orthonormal(seed):
    # On orthonormal centered designs with uniform weights, the lasso
    # solution is the soft threshold of the least-squares coefficient.
    rng = np.random.default_rng(seed)
    n, p = 30, 5
    X = orthonormal_design(rng, n, p)
    y = rng.normal(size=n)
    lam = float(rng.uniform(0.05, 1.5))
    w = np.ones(n)
    beta_ls = X.T @ y
    expected = soft_threshold(beta_ls, lam / 2.0)
    _, beta = lasso_coordinate_descent(X, y, w, lam)
    assert np.max(np.abs(beta - expected)) < 1e-8


def test_full_k_refit_equals_weighted_least_squares():
    rng = np.random.default_rng(5)
    n, p = 24, 4
    X = rng.normal(size=(n, p))
    y = rng.normal(size=n)
    w = rng.uniform(0.2, 1.0, size=n)
    model = WeightedKLasso(k=p).fit(X, y, sample_weight=w)
    assert np.array_equal(model.selected_, np.arange(p))

    A = np.hstack([np.ones((n, 1)), X])
    coef = np.linalg.solve(A.T @ (w[:, None] * A), A.T @ (w * y))
    assert abs(model.intercept_ - coef[0]) < 1e-6
    assert np.max(np.abs(model.coef_ - coef[1:])) < 1e-6


def test_noiseless_single_feature_recovery():
    rng = np.random.default_rng(7)
    Z = (rng.random((120, 8)) < 0.5).astype(float)
    y = 2.0 * Z[:, 3]
    model = WeightedKLasso(k=1).fit(Z, y)
    assert model.selected_.tolist() == [3]
    assert model.coef_[0] == pytest.approx(2.0, abs=1e-6)
    assert model.intercept_ == pytest.approx(0.0, abs=1e-6)


def test_weighted_samples_steer_the_fit():
    # Two contradictory halves; the heavily weighted half wins.
    X = np.array([[1.0], [1.0], [1.0], [1.0]])
    y = np.array([2.0, 2.0, -2.0, -2.0])
    w_hi_first = np.array([100.0, 100.0, 1e-6, 1e-6])
    model = WeightedKLasso(k=1).fit(np.hstack([X, np.eye(4)[:, :1]]), y, sample_weight=w_hi_first)
    pred = model.predict(np.array([[1.0, 0.0]]))
    assert pred[0] == pytest.approx(2.0, abs=1e-3)


@pytest.mark.parametrize("k,p", [(1, 6), (3, 6), (6, 6), (9, 6), (2, 2)])
def test_cardinality_always_min_k_p(k, p):
    rng = np.random.default_rng(k * 31 + p)
    X = (rng.random((60, p)) < 0.5).astype(float)
    y = rng.normal(size=60)
    model = WeightedKLasso(k=k).fit(X, y)
    assert len(model.selected_) == min(k, p)
    assert len(model.coef_) == min(k, p)
    assert (model.selected_ < p).all()


def test_constant_column_never_blocks_selection():
    rng = np.random.default_rng(11)
    X = (rng.random((50, 4)) < 0.5).astype(float)
    X[:, 2] = 1.0  # constant-on segment
    y = 1.5 * X[:, 0] + rng.normal(scale=0.01, size=50)
    model = WeightedKLasso(k=4).fit(X, y)
    assert len(model.selected_) == 4


def test_zero_signal_is_a_distinct_error():
    X = (np.random.default_rng(0).random((20, 3)) < 0.5).astype(float)
    with pytest.raises(ZeroSignalError):
        WeightedKLasso(k=1).fit(X, np.full(20, 0.75))


def test_select_k_features_deterministic():
    rng = np.random.default_rng(13)
    X = (rng.random((40, 7)) < 0.5).astype(float)
    y = X @ np.array([0.0, 1.0, 0.0, -2.0, 0.5, 0.0, 0.0]) + rng.normal(scale=0.01, size=40)
    w = np.ones(40)
    a = select_k_features(X, y, w, 3)
    b = select_k_features(X, y, w, 3)
    assert np.array_equal(a, b)
    assert 3 in a and 1 in a


def test_weighted_least_squares_ridge_is_negligible():
    rng = np.random.default_rng(17)
    X = rng.normal(size=(30, 3))
    y = X @ np.array([1.0, -2.0, 0.5]) + 3.0
    intercept, coef = weighted_least_squares(X, y, np.ones(30))
    assert intercept == pytest.approx(3.0, abs=1e-6)
    assert coef == pytest.approx([1.0, -2.0, 0.5], abs=1e-6)
