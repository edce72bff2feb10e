import logging
import re
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import DegenerateError, NoSupportError
from ..models import KernelSpec, RegressionDataset, Skeleton, SkeletonPosition
from ..utils import squared_distances
from .base import SkeletonRegressor

_BANDWIDTH = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(rhns)?\s*$")


def r_hns(skeleton: Skeleton) -> float:
    """Mean distance from each knot to its nearest other knot in the same component."""
    knots = skeleton.knots
    d2 = squared_distances(knots, knots)
    same = skeleton.component[:, None] == skeleton.component[None, :]
    np.fill_diagonal(same, False)
    d2 = np.where(same, d2, np.inf)
    nearest = d2.min(axis=1)
    finite = np.isfinite(nearest)
    if not finite.any():
        raise DegenerateError("every knot is alone in its component; r_hns is undefined")
    return float(np.sqrt(nearest[finite]).mean())


def parse_bandwidth(text: str, family: str = "gaussian") -> KernelSpec:
    """Reads "4rhns" as 4 times r_hns and "0.3" as an absolute bandwidth."""
    match = _BANDWIDTH.match(str(text))
    if not match:
        raise ValueError(f"Cannot parse bandwidth '{text}', expected e.g. '4rhns' or '0.3'")
    return KernelSpec(family=family, bandwidth=float(match.group(1)), relative=match.group(2) is not None)


def format_bandwidth(spec: KernelSpec) -> str:
    return f"{spec.bandwidth!r}rhns" if spec.relative else repr(spec.bandwidth)


def kernel_weights(distances: np.ndarray, family: str, h: float) -> np.ndarray:
    """Kernel weights K(d / h); infinite distances get weight 0."""
    u = np.asarray(distances, dtype=float) / h
    finite = np.isfinite(u)
    safe = np.where(finite, u, 0.0)
    if family == "gaussian":
        weights = np.exp(-0.5 * safe * safe)
    elif family == "epanechnikov":
        weights = np.where(np.abs(safe) <= 1.0, 0.75 * (1.0 - safe * safe), 0.0)
    else:
        raise ValueError(f"Unknown kernel family: {family}")
    return np.where(finite, weights, 0.0)


def _weighted_means(weights: np.ndarray, responses: np.ndarray) -> np.ndarray:
    total = weights.sum(axis=1)
    out = np.full(weights.shape[0], np.nan)
    ok = total > 0
    out[ok] = (weights[ok] @ responses) / total[ok]
    return out


def s_kernel_predict(
    train: RegressionDataset, query: SkeletonPosition, spec: KernelSpec, dists: np.ndarray
) -> float:
    """Nadaraya-Watson estimate at one query from its row of skeleton distances."""
    rhns = r_hns(train.skeleton) if spec.relative else None
    weights = kernel_weights(np.asarray(dists)[None, :], spec.family, spec.resolve(rhns))
    value = _weighted_means(weights, train.responses)[0]
    if np.isnan(value):
        raise NoSupportError(f"no training point has positive kernel weight at {query}")
    return float(value)


class SkeletonKernelRegressor(SkeletonRegressor):
    method = "skernel"

    def __init__(self, spec: KernelSpec, locality: bool = False, fallback: bool = False):
        super().__init__(locality=locality, fallback=fallback)
        self.spec = spec
        self.bandwidth: Optional[float] = None

    def _fit(self) -> None:
        rhns = r_hns(self.train.skeleton) if self.spec.relative else None
        self.bandwidth = self.spec.resolve(rhns)
        logging.debug(f"Kernel bandwidth {self.bandwidth:.6g} ({format_bandwidth(self.spec)})")

    def _predict_rows(self, positions: List[SkeletonPosition], distances: Optional[np.ndarray]) -> np.ndarray:
        weights = kernel_weights(distances, self.spec.family, self.bandwidth)
        return _weighted_means(weights, self.train.responses)

    def params(self) -> Dict[str, Any]:
        params = super().params()
        params.update(family=self.spec.family, bandwidth=format_bandwidth(self.spec))
        return params

    @classmethod
    def from_params(cls, params: Dict[str, Any]) -> "SkeletonKernelRegressor":
        spec = parse_bandwidth(params.get("bandwidth", "1rhns"), params.get("family", "gaussian"))
        return cls(spec, locality=params.get("locality", False), fallback=params.get("fallback", False))
