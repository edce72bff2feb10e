from typing import Any, Dict, Optional

from ..models import Skeleton
from .base import SkeletonRegressor
from .baselines import (
    EuclideanKnnRegressor,
    LassoRegressor,
    MeanRegressor,
    RidgeRegressor,
    euclidean_knn,
    lasso_baseline,
    ridge_baseline,
)
from .kernel import (
    SkeletonKernelRegressor,
    format_bandwidth,
    kernel_weights,
    parse_bandwidth,
    r_hns,
    s_kernel_predict,
)
from .knn import SkeletonKnnRegressor, knn_neighbourhood, knn_radii, s_knn_predict
from .spline import (
    SkeletonSplineRegressor,
    s_lspline_fit,
    s_lspline_predict,
    spline_transform,
    unsupported_knots,
)

SKELETON_METHODS = {
    cls.method: cls for cls in (SkeletonKernelRegressor, SkeletonKnnRegressor, SkeletonSplineRegressor)
}
AMBIENT_METHODS = {
    cls.method: cls for cls in (EuclideanKnnRegressor, RidgeRegressor, LassoRegressor, MeanRegressor)
}


def model_from_dict(data: Dict[str, Any], skeleton: Optional[Skeleton] = None) -> Any:
    method = data.get("method")
    if method in SKELETON_METHODS:
        if skeleton is None:
            raise ValueError(f"method '{method}' needs its skeleton to be restored")
        return SKELETON_METHODS[method].from_dict(data, skeleton)
    if method in AMBIENT_METHODS:
        return AMBIENT_METHODS[method].from_dict(data)
    raise ValueError(f"Unknown method: {method}")


__all__ = [
    "AMBIENT_METHODS",
    "EuclideanKnnRegressor",
    "LassoRegressor",
    "MeanRegressor",
    "RidgeRegressor",
    "SKELETON_METHODS",
    "SkeletonKernelRegressor",
    "SkeletonKnnRegressor",
    "SkeletonRegressor",
    "SkeletonSplineRegressor",
    "euclidean_knn",
    "format_bandwidth",
    "kernel_weights",
    "knn_neighbourhood",
    "knn_radii",
    "lasso_baseline",
    "model_from_dict",
    "parse_bandwidth",
    "r_hns",
    "ridge_baseline",
    "s_kernel_predict",
    "s_knn_predict",
    "s_lspline_fit",
    "s_lspline_predict",
    "spline_transform",
    "unsupported_knots",
]
