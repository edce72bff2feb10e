import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core import decode_position, encode_position, position_component
from ..errors import NoSupportError, ShapeError
from ..models import RegressionDataset, Skeleton, SkeletonPosition
from ..projection import DistanceEngine, position_arrays


class SkeletonRegressor:
    """Shared plumbing of the regressors that work on skeleton positions.

    Subclasses implement `_predict_rows(positions, distances)` returning one
    value per query, NaN where the estimator has no support.
    """

    method = ""
    needs_distances = True

    def __init__(self, locality: bool = False, fallback: bool = False):
        self.locality = locality
        self.fallback = fallback
        self.train: Optional[RegressionDataset] = None
        self.engine: Optional[DistanceEngine] = None
        self._component_means: Dict[int, float] = {}
        self._global_mean = 0.0

    def fit(self, dataset: RegressionDataset, engine: Optional[DistanceEngine] = None) -> "SkeletonRegressor":
        if dataset.n == 0:
            raise ShapeError("cannot fit on an empty dataset")
        if engine is not None and engine.skeleton is not dataset.skeleton:
            raise ShapeError("distance engine belongs to a different skeleton")
        self.train = dataset
        if self.needs_distances:
            self.engine = engine if engine is not None else DistanceEngine(dataset.skeleton)
        components = dataset.skeleton.component[self._anchor_knots(dataset.positions)]
        self._component_means = {
            int(label): float(dataset.responses[components == label].mean())
            for label in np.unique(components)
        }
        self._global_mean = float(dataset.responses.mean())
        self._fit()
        return self

    def _fit(self) -> None:
        pass

    def _anchor_knots(self, positions: Sequence[SkeletonPosition]) -> np.ndarray:
        return position_arrays(positions, self.train.skeleton).a

    def distances(self, positions: Sequence[SkeletonPosition]) -> np.ndarray:
        """Query-by-train skeleton distance matrix."""
        self._check_fitted()
        return self.engine.pairwise(positions, self.train.positions, self.locality)

    def predict(
        self, positions: Sequence[SkeletonPosition], distances: Optional[np.ndarray] = None
    ) -> np.ndarray:
        self._check_fitted()
        positions = list(positions)
        if self.needs_distances and distances is None:
            distances = self.distances(positions)
        if distances is not None and distances.shape != (len(positions), self.train.n):
            raise ShapeError(
                f"distance matrix must be {len(positions)} x {self.train.n}, got {distances.shape}"
            )
        values = self._predict_rows(positions, distances)
        missing = np.flatnonzero(np.isnan(values))
        if missing.size:
            if not self.fallback:
                raise NoSupportError(
                    f"{missing.size} of {len(positions)} queries have no training support, first at row {missing[0]}"
                )
            logging.warning(f"Falling back to component means for {missing.size} unsupported queries")
            values[missing] = self.fallback_values([positions[i] for i in missing])
        return values

    def fallback_values(self, positions: Sequence[SkeletonPosition]) -> np.ndarray:
        """Mean training response of each query's component, else the global mean."""
        self._check_fitted()
        skeleton = self.train.skeleton
        return np.array(
            [self._component_means.get(position_component(p, skeleton), self._global_mean) for p in positions],
            dtype=float,
        )

    def _predict_rows(
        self, positions: List[SkeletonPosition], distances: Optional[np.ndarray]
    ) -> np.ndarray:
        raise NotImplementedError

    def _check_fitted(self) -> None:
        if self.train is None:
            raise RuntimeError(f"{type(self).__name__} is not fitted")

    def params(self) -> Dict[str, Any]:
        return {"locality": self.locality, "fallback": self.fallback}

    def to_dict(self) -> Dict[str, Any]:
        self._check_fitted()
        return {
            "method": self.method,
            "params": self.params(),
            "positions": [list(encode_position(p)) for p in self.train.positions],
            "responses": self.train.responses.tolist(),
        }

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "SkeletonRegressor":
        raise NotImplementedError

    @classmethod
    def from_dict(cls, data: Dict[str, Any], skeleton: Skeleton) -> "SkeletonRegressor":
        """Rebuilds a fitted model; fitting is deterministic so the training data is enough."""
        positions = [decode_position(*row) for row in data["positions"]]
        dataset = RegressionDataset(positions, np.array(data["responses"], dtype=float), skeleton)
        return cls.from_params(data["params"]).fit(dataset)
