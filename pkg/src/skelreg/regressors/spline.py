import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core import check_position
from ..models import KnotPosition, Skeleton, SkeletonPosition, SplineDesign
from ..penalty import gen_lasso_fixed_lambda, gen_ridge_fit, graph_operators, least_squares_fit
from .base import SkeletonRegressor

PENALTIES = ("none", "lapsmooth", "trendfilter")


def spline_transform(positions: Sequence[SkeletonPosition], skeleton: Skeleton) -> np.ndarray:
    """Barycentric design matrix: row i holds the weights of position i on its edge endpoints."""
    Z = np.zeros((len(positions), skeleton.k))
    for row, position in enumerate(positions):
        check_position(position, skeleton)
        if isinstance(position, KnotPosition):
            Z[row, position.index] = 1.0
        else:
            edge = skeleton.edges[position.edge]
            Z[row, edge.i] = 1.0 - position.t
            Z[row, edge.j] = position.t
    return Z


def unsupported_knots(Z: np.ndarray) -> np.ndarray:
    """Knots no training position puts weight on."""
    return np.flatnonzero(~np.any(Z > 0, axis=0))


def s_lspline_fit(Z: np.ndarray, y: np.ndarray) -> np.ndarray:
    idle = unsupported_knots(np.asarray(Z))
    if idle.size:
        logging.warning(f"Knots without incident data: {idle.tolist()}; their values take the minimum-norm solution")
    return least_squares_fit(Z, y)


def s_lspline_predict(position: SkeletonPosition, beta: np.ndarray, skeleton: Skeleton) -> float:
    if isinstance(position, KnotPosition):
        return float(beta[position.index])
    edge = skeleton.edges[position.edge]
    return float(beta[edge.i] + position.t * (beta[edge.j] - beta[edge.i]))


class SkeletonSplineRegressor(SkeletonRegressor):
    """Linear spline on the skeleton, optionally with a graph smoothness penalty on knot values."""

    method = "slspline"
    needs_distances = False

    def __init__(
        self,
        penalty: str = "none",
        order: int = 0,
        lam: float = 0.0,
        locality: bool = False,
        fallback: bool = False,
    ):
        if penalty not in PENALTIES:
            raise ValueError(f"Unknown penalty '{penalty}', expected one of {PENALTIES}")
        if lam < 0:
            raise ValueError(f"lambda must be nonnegative, got {lam}")
        super().__init__(locality=locality, fallback=fallback)
        self.penalty = penalty
        self.order = order
        self.lam = lam
        self.design: Optional[SplineDesign] = None
        self._idle = np.zeros(0, dtype=int)

    def _fit(self) -> None:
        skeleton = self.train.skeleton
        Z = spline_transform(self.train.positions, skeleton)
        y = self.train.responses
        if self.penalty == "none" or self.lam == 0:
            beta = s_lspline_fit(Z, y)
        else:
            delta = graph_operators(skeleton, self.order).delta
            if self.penalty == "lapsmooth":
                beta = gen_ridge_fit(Z, y, delta, self.lam)
            else:
                beta = gen_lasso_fixed_lambda(Z, y, delta, self.lam)
        self.design = SplineDesign(Z=Z, beta=beta)
        self._idle = unsupported_knots(Z) if self.penalty == "none" else np.zeros(0, dtype=int)

    @property
    def beta(self) -> np.ndarray:
        self._check_fitted()
        return self.design.beta

    def _predict_rows(self, positions: List[SkeletonPosition], distances: Optional[np.ndarray]) -> np.ndarray:
        Zq = spline_transform(positions, self.train.skeleton)
        values = Zq @ self.design.beta
        if self.fallback and self._idle.size:
            # without a penalty, knots without data carry no fitted information
            touched = Zq > 0
            supported = np.any(touched & ~np.isin(np.arange(Zq.shape[1]), self._idle), axis=1)
            values[~supported] = np.nan
        return values

    def params(self) -> Dict[str, Any]:
        params = super().params()
        params.update(penalty=self.penalty, order=self.order, lam=self.lam)
        return params

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data["beta"] = self.design.beta.tolist()
        return data

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "SkeletonSplineRegressor":
        return cls(
            penalty=params.get("penalty", "none"),
            order=int(params.get("order", 0)),
            lam=float(params.get("lam", 0.0)),
            locality=params.get("locality", False),
            fallback=params.get("fallback", False),
        )
