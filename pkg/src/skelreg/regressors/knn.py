import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..errors import NoSupportError
from ..models import KnnSpec, RegressionDataset, SkeletonPosition
from .base import SkeletonRegressor


def knn_radii(distances: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row radius R_k over finite distances, and how many finite distances each row has.

    Rows with fewer than k finite distances use their largest finite distance;
    rows with none get NaN.
    """
    distances = np.atleast_2d(np.asarray(distances, dtype=float))
    reachable = np.isfinite(distances).sum(axis=1)
    ordered = np.sort(distances, axis=1)
    radii = np.full(distances.shape[0], np.nan)
    ok = reachable > 0
    index = np.minimum(k, reachable) - 1
    radii[ok] = ordered[np.flatnonzero(ok), index[ok]]
    return radii, reachable


def knn_neighbourhood(dists: np.ndarray, k: int) -> Tuple[np.ndarray, bool]:
    """Mask of all points within R_k (ties included) and whether fewer than k were reachable."""
    radii, reachable = knn_radii(dists, k)
    if reachable[0] == 0:
        raise NoSupportError("no training point is reachable from the query")
    return np.asarray(dists) <= radii[0], bool(reachable[0] < k)


def s_knn_predict(
    train: RegressionDataset, query: SkeletonPosition, spec: KnnSpec, dists: np.ndarray
) -> float:
    mask, short = knn_neighbourhood(dists, spec.k)
    if short:
        logging.warning(f"Only {int(mask.sum())} training points reachable from {query}, fewer than k={spec.k}")
    return float(train.responses[mask].mean())


class SkeletonKnnRegressor(SkeletonRegressor):
    method = "sknn"

    def __init__(self, spec: KnnSpec, locality: bool = False, fallback: bool = False):
        super().__init__(locality=locality, fallback=fallback)
        self.spec = spec
        self.short_rows = np.zeros(0, dtype=int)

    def _predict_rows(self, positions: List[SkeletonPosition], distances: Optional[np.ndarray]) -> np.ndarray:
        radii, reachable = knn_radii(distances, self.spec.k)
        mask = distances <= radii[:, None]
        counts = mask.sum(axis=1)
        out = np.full(len(positions), np.nan)
        ok = counts > 0
        out[ok] = (mask[ok] @ self.train.responses) / counts[ok]
        self.short_rows = np.flatnonzero((reachable < self.spec.k) & (reachable > 0))
        if self.short_rows.size:
            logging.warning(
                f"{self.short_rows.size} queries reach fewer than k={self.spec.k} training points; using all reachable"
            )
        return out

    def params(self) -> Dict[str, Any]:
        params = super().params()
        params.update(k=self.spec.k)
        return params

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "SkeletonKnnRegressor":
        return cls(
            KnnSpec(int(params["k"])),
            locality=params.get("locality", False),
            fallback=params.get("fallback", False),
        )
