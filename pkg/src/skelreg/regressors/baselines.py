"""Ambient-space baselines the skeleton regressors are compared against."""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from ..errors import ShapeError
from ..penalty import gen_lasso_fixed_lambda
from ..utils import squared_distances


def _check_xy(X: np.ndarray, y: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeError(f"covariates must be a non-empty n x d matrix, got shape {X.shape}")
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != (X.shape[0],):
            raise ShapeError(f"responses must have length {X.shape[0]}, got shape {y.shape}")
    return X, y


def euclidean_knn(X: np.ndarray, y: np.ndarray, Xq: np.ndarray, k: int) -> np.ndarray:
    """Mean response of the k nearest training rows in the ambient space; distance ties go to the lower index."""
    d2 = squared_distances(np.asarray(Xq, dtype=float), np.asarray(X, dtype=float))
    k = min(k, d2.shape[1])
    nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return np.asarray(y, dtype=float)[nearest].mean(axis=1)


def ridge_baseline(X: np.ndarray, y: np.ndarray, lam: float) -> Tuple[np.ndarray, float]:
    """Ridge coefficients on centered data, returned as (coef, intercept)."""
    X, y = _check_xy(X, y)
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    x_mean, y_mean = X.mean(axis=0), y.mean()
    Xc, yc = X - x_mean, y - y_mean
    n, d = Xc.shape
    if lam == 0:
        coef = linalg.lstsq(Xc, yc, lapack_driver="gelsd")[0]
    elif d > n:
        coef = Xc.T @ linalg.solve(Xc @ Xc.T + lam * np.eye(n), yc, assume_a="pos")
    else:
        coef = linalg.solve(Xc.T @ Xc + lam * np.eye(d), Xc.T @ yc, assume_a="pos")
    return coef, float(y_mean - x_mean @ coef)


def lasso_baseline(X: np.ndarray, y: np.ndarray, lam: float) -> Tuple[np.ndarray, float]:
    """Lasso coefficients (1/2 squared loss plus lam times the l1 norm) on centered data."""
    X, y = _check_xy(X, y)
    x_mean, y_mean = X.mean(axis=0), y.mean()
    coef = gen_lasso_fixed_lambda(X - x_mean, y - y_mean, np.eye(X.shape[1]), lam)
    return coef, float(y_mean - x_mean @ coef)


class EuclideanKnnRegressor:
    method = "knn"

    def __init__(self, k: int):
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        self.k = k
        self.X: Optional[np.ndarray] = None
        self.y: Optional[np.ndarray] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "EuclideanKnnRegressor":
        self.X, self.y = _check_xy(X, y)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return euclidean_knn(self.X, self.y, _check_xy(X)[0], self.k)

    def to_dict(self) -> Dict[str, Any]:
        return {"method": self.method, "params": {"k": self.k}, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EuclideanKnnRegressor":
        return cls(int(data["params"]["k"])).fit(np.array(data["X"]), np.array(data["y"]))


class _LinearRegressor:
    method = ""

    def __init__(self, lam: float = 0.0):
        self.lam = lam
        self.coef: Optional[np.ndarray] = None
        self.intercept = 0.0

    def _solve(self, X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
        raise NotImplementedError

    def fit(self, X: np.ndarray, y: np.ndarray) -> "_LinearRegressor":
        self.coef, self.intercept = self._solve(X, y)
        logging.debug(f"{self.method} with lambda={self.lam}: {int(np.sum(self.coef != 0))} nonzero coefficients")
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = _check_xy(X)[0]
        if X.shape[1] != self.coef.shape[0]:
            raise ShapeError(f"expected {self.coef.shape[0]} covariates, got {X.shape[1]}")
        return X @ self.coef + self.intercept

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "params": {"lam": self.lam},
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "_LinearRegressor":
        model = cls(float(data["params"]["lam"]))
        model.coef = np.array(data["coef"], dtype=float)
        model.intercept = float(data["intercept"])
        return model


class RidgeRegressor(_LinearRegressor):
    method = "ridge"

    def _solve(self, X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
        return ridge_baseline(X, y, self.lam)


class LassoRegressor(_LinearRegressor):
    method = "lasso"

    def _solve(self, X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
        return lasso_baseline(X, y, self.lam)


class MeanRegressor:
    """Predicts the training mean everywhere."""

    method = "mean"

    def __init__(self) -> None:
        self.mean = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MeanRegressor":
        self.mean = float(_check_xy(X, y)[1].mean())
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.full(_check_xy(X)[0].shape[0], self.mean)

    def to_dict(self) -> Dict[str, Any]:
        return {"method": self.method, "params": {}, "mean": self.mean}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MeanRegressor":
        model = cls()
        model.mean = float(data["mean"])
        return model
