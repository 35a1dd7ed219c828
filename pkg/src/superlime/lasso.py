"""Weighted Lasso coordinate descent and the two-stage K-feature selector.

Minimizes sum_i w_i (y_i - b0 - x_i . beta)^2 + lam * ||beta||_1 with an
unpenalized intercept; the coordinate update is the soft threshold
S(rho_j, lam/2) / (sum_i w_i x_ij^2).
"""

import numpy as np
from sklearn.base import BaseEstimator

__all__ = [
    "WeightedKLasso",
    "ZeroSignalError",
    "lasso_coordinate_descent",
    "select_k_features",
    "soft_threshold",
    "weighted_least_squares",
]


class ZeroSignalError(ValueError):
    """Every response value is identical; there is nothing to regress on."""


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_coordinate_descent(X, y, sample_weight, lam, beta=None, intercept=None, max_iter=1000, tol=1e-12):
    """Cyclic coordinate descent for the weighted Lasso; returns (intercept, beta)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(sample_weight, dtype=np.float64)
    n, p = X.shape
    w_total = float(w.sum())
    col_norms = (w[:, None] * X * X).sum(axis=0)

    beta = np.zeros(p) if beta is None else beta.astype(np.float64).copy()
    if intercept is None:
        intercept = float(w @ y / w_total)
    residual = y - intercept - X @ beta

    for _ in range(max_iter):
        delta = 0.0
        new_intercept = float(w @ (residual + intercept) / w_total)
        residual += intercept - new_intercept
        delta = max(delta, abs(new_intercept - intercept))
        intercept = new_intercept
        for j in range(p):
            if col_norms[j] == 0.0:
                continue
            b_old = beta[j]
            rho = float(w @ (X[:, j] * residual)) + b_old * col_norms[j]
            b_new = float(soft_threshold(rho, lam / 2.0)) / col_norms[j]
            if b_new != b_old:
                residual += X[:, j] * (b_old - b_new)
                beta[j] = b_new
                delta = max(delta, abs(b_new - b_old))
        if delta <= tol:
            break
    return intercept, beta


def _rank_desc(values):
    """Indices sorted by descending value, ties to the smaller index."""
    values = np.asarray(values)
    return np.lexsort((np.arange(len(values)), -values))


def select_k_features(X, y, sample_weight, k, n_path=100, min_lambda_ratio=1e-4):
    """Walk a geometric lambda path downward until exactly k coefficients live.

    Stops at the first path point with exactly k nonzeros; if the count jumps
    past k between points, takes the k largest |beta| there. If the path ends
    with fewer than k active features (e.g. constant columns), the remainder
    is filled by descending weighted feature-response covariance.
    Returns ascending feature indices.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(sample_weight, dtype=np.float64)
    n, p = X.shape
    k = min(int(k), p)

    y_bar = float(w @ y / w.sum())
    cov = X.T @ (w * (y - y_bar))
    lam_max = 2.0 * float(np.max(np.abs(cov)))
    if lam_max == 0.0:
        return np.arange(k)

    lams = lam_max * (float(min_lambda_ratio) ** np.linspace(0.0, 1.0, int(n_path)))
    beta = np.zeros(p)
    intercept = None
    active = np.zeros(0, dtype=np.int64)
    for lam in lams:
        intercept, beta = lasso_coordinate_descent(X, y, w, lam, beta=beta, intercept=intercept)
        active = np.flatnonzero(beta != 0.0)
        if len(active) == k:
            return np.sort(active)
        if len(active) > k:
            ranked = _rank_desc(np.abs(beta))
            return np.sort(ranked[:k])
    chosen = list(active)
    for j in _rank_desc(np.abs(cov)):
        if len(chosen) == k:
            break
        if j not in chosen:
            chosen.append(int(j))
    return np.sort(np.asarray(chosen, dtype=np.int64))


def weighted_least_squares(X, y, sample_weight, ridge=1e-8):
    """Weighted least squares with a small ridge for conditioning.

    Returns (intercept, coef); the intercept is damped along with the rest,
    which at ridge=1e-8 is far below the contracted tolerances.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(sample_weight, dtype=np.float64)
    A = np.hstack([np.ones((len(y), 1)), X])
    M = A.T @ (w[:, None] * A) + ridge * np.eye(A.shape[1])
    coef = np.linalg.solve(M, A.T @ (w * y))
    return float(coef[0]), coef[1:]


class WeightedKLasso(BaseEstimator):
    """Two-stage sparse regressor: Lasso-path selection of k features, then a
    weighted least-squares refit restricted to them.

    After fit: selected_ (ascending indices, always min(k, n_features) of
    them), coef_ (aligned with selected_), intercept_.
    """

    def __init__(self, k=5, n_path=100, min_lambda_ratio=1e-4, ridge=1e-8):
        self.k = k
        self.n_path = n_path
        self.min_lambda_ratio = min_lambda_ratio
        self.ridge = ridge

    def fit(self, X, y, sample_weight=None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or len(X) != len(y):
            raise ValueError(f"bad design shape {X.shape} for {len(y)} responses")
        if len(y) < 2:
            raise ValueError("need at least 2 samples")
        if int(self.k) < 1:
            raise ValueError("k must be >= 1")
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
        if np.ptp(y) == 0.0:
            raise ZeroSignalError("all responses identical; the classifier gave no signal on this pool")
        self.selected_ = select_k_features(X, y, w, self.k, self.n_path, self.min_lambda_ratio)
        self.intercept_, self.coef_ = weighted_least_squares(X[:, self.selected_], y, w, self.ridge)
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        return self.intercept_ + X[:, self.selected_] @ self.coef_
