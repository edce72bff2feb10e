"""Cross-validated comparison of skeleton regressors and ambient baselines over repeated datasets."""

import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .caching import SkeletonCache
from .datagen import default_sizes, generate, scale_sizes
from .errors import ConfigError, SkelregError
from .models import (
    BestChoice,
    CvPlan,
    ExperimentReport,
    GenSpec,
    KernelSpec,
    KnnSpec,
    MethodSpec,
    PointCloud,
    RegressionDataset,
    Skeleton,
    SkeletonPosition,
    SseRecord,
    SseSummary,
    format_value,
)
from .projection import DistanceEngine, project_all
from .regressors import (
    EuclideanKnnRegressor,
    LassoRegressor,
    MeanRegressor,
    RidgeRegressor,
    SkeletonKernelRegressor,
    SkeletonKnnRegressor,
    SkeletonSplineRegressor,
)

SKELETON_METHODS = ("skernel", "sknn", "slspline")
AMBIENT_METHODS = ("knn", "ridge", "lasso", "mean")

# Parameter names each method accepts, in label order.
METHOD_PARAMS: Dict[str, Tuple[str, ...]] = {
    "skernel": ("bandwidth_rhns", "bandwidth", "family"),
    "sknn": ("k",),
    "slspline": ("penalty", "order", "lambda"),
    "knn": ("k",),
    "ridge": ("lambda",),
    "lasso": ("lambda",),
    "mean": (),
}

DEFAULT_GRID: Dict[str, Dict[str, List[Any]]] = {
    "skernel": {"bandwidth_rhns": [0.5, 1.0, 2.0, 4.0, 8.0]},
    "sknn": {"k": [3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36]},
    "slspline": {"penalty": ["none"]},
    "knn": {"k": [3, 6, 9, 12, 15, 18, 21, 24, 27, 30, 33, 36]},
    "ridge": {"lambda": [0.01, 0.1, 1.0, 10.0, 100.0]},
    "lasso": {"lambda": [0.01, 0.1, 1.0, 10.0]},
    "mean": {},
}


def kfold_split(n: int, n_folds: int, seed: int) -> np.ndarray:
    """Fold id of every index: a seeded permutation cut into nearly equal folds."""
    if n_folds < 2 or n_folds > n:
        raise ConfigError(f"n_folds must be between 2 and n={n}, got {n_folds}")
    order = np.random.default_rng(seed).permutation(n)
    assignment = np.empty(n, dtype=int)
    for fold, members in enumerate(np.array_split(order, n_folds)):
        assignment[members] = fold
    return assignment


def percentiles(values: Sequence[float]) -> SseSummary:
    p5, median, p95 = np.percentile(np.asarray(values, dtype=float), [5.0, 50.0, 95.0])
    return SseSummary(median=float(median), p5=float(p5), p95=float(p95))


def _value_key(value: Any) -> Tuple[int, Any]:
    if value is None:
        return (0, 0)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (1, float(value))
    return (2, str(value))


def param_key(spec: MethodSpec) -> Tuple[Tuple[int, Any], ...]:
    """Ordering of parameter tuples used to break ties between equal medians."""
    return tuple(_value_key(value) for _, value in spec.params)


def expand_grid(plan: CvPlan) -> List[MethodSpec]:
    """Every (method, knots, components, parameter) combination the plan evaluates."""
    specs: List[MethodSpec] = []
    for method in plan.methods:
        if method not in METHOD_PARAMS:
            raise ConfigError(f"Unknown method '{method}', expected one of {sorted(METHOD_PARAMS)}")
        grid = plan.grid.get(method, DEFAULT_GRID[method])
        unknown = set(grid) - set(METHOD_PARAMS[method])
        if unknown:
            raise ConfigError(f"Unknown parameters for {method}: {sorted(unknown)}")
        names = [name for name in METHOD_PARAMS[method] if name in grid]
        if method == "skernel" and len({"bandwidth", "bandwidth_rhns"} & set(names)) != 1:
            raise ConfigError("skernel needs exactly one of bandwidth_rhns and bandwidth")
        for name in names:
            if not grid[name]:
                raise ConfigError(f"grid for {method}.{name} is empty")
        prefix: List[List[Tuple[str, Any]]] = [[]]
        if method in SKELETON_METHODS:
            prefix = [
                [("knots", knots), ("components", components)]
                for knots, components in itertools.product(plan.knots, plan.components)
            ]
        seen = set()
        for head in prefix:
            for values in itertools.product(*(grid[name] for name in names)):
                params = dict(zip(names, values))
                if method == "slspline" and params.get("penalty", "none") == "none":
                    # order and lambda do not apply without a penalty
                    params = {name: value for name, value in params.items() if name == "penalty"}
                spec = MethodSpec(method, tuple(head) + tuple(params.items()))
                if spec not in seen:
                    seen.add(spec)
                    specs.append(spec)
    return specs


def make_model(spec: MethodSpec, plan: CvPlan) -> Any:
    params = spec.param_dict
    method = spec.method
    if method == "skernel":
        family = params.get("family", "gaussian")
        if "bandwidth_rhns" in params:
            kernel = KernelSpec(family, float(params["bandwidth_rhns"]), relative=True)
        else:
            kernel = KernelSpec(family, float(params["bandwidth"]), relative=False)
        return SkeletonKernelRegressor(kernel, locality=plan.locality, fallback=plan.fallback)
    if method == "sknn":
        return SkeletonKnnRegressor(KnnSpec(int(params["k"])), locality=plan.locality, fallback=plan.fallback)
    if method == "slspline":
        return SkeletonSplineRegressor(
            penalty=params.get("penalty", "none"),
            order=int(params.get("order", 0)),
            lam=float(params.get("lambda", 0.0)),
            fallback=plan.fallback,
        )
    if method == "knn":
        return EuclideanKnnRegressor(int(params["k"]))
    if method == "ridge":
        return RidgeRegressor(float(params["lambda"]))
    if method == "lasso":
        return LassoRegressor(float(params["lambda"]))
    if method == "mean":
        return MeanRegressor()
    raise ConfigError(f"Unknown method '{method}'")


@dataclass
class SkeletonView:
    """A fold's skeleton with both portions projected and distance matrices computed on demand."""

    skeleton: Skeleton
    engine: DistanceEngine
    train_positions: List[SkeletonPosition]
    test_positions: List[SkeletonPosition]
    _distances: Dict[bool, np.ndarray] = field(default_factory=dict)

    def test_distances(self, locality: bool) -> np.ndarray:
        if locality not in self._distances:
            self._distances[locality] = self.engine.pairwise(
                self.test_positions, self.train_positions, locality
            )
        return self._distances[locality]


class FoldContext:
    """Training and held-out rows of one fold, with per-fold skeletons built on the training rows only."""

    def __init__(
        self,
        cloud: PointCloud,
        train: np.ndarray,
        test: np.ndarray,
        plan: CvPlan,
        replicate: int,
        fold: int,
        cache: SkeletonCache,
        dataset: str = "data",
    ):
        self.train_cloud = cloud.subset(train)
        self.test_cloud = cloud.subset(test)
        self.plan = plan
        self.replicate = replicate
        self.fold = fold
        self.cache = cache
        self.dataset = dataset
        self._views: Dict[Tuple[Optional[int], int], SkeletonView] = {}

    def view(self, knots: Optional[int], components: int) -> SkeletonView:
        key = (knots, components)
        if key not in self._views:
            cfg = replace(
                self.plan.build,
                n_knots=knots,
                n_components=components,
                seed=self.plan.build.seed + 1000 * self.replicate + self.fold,
            )
            cache_key = (self.dataset, self.replicate, self.fold, format_value(knots), components)
            skeleton = self.cache.get_or_build(cache_key, self.train_cloud, cfg)
            self._views[key] = SkeletonView(
                skeleton=skeleton,
                engine=DistanceEngine(skeleton),
                train_positions=project_all(self.train_cloud.points, skeleton),
                test_positions=project_all(self.test_cloud.points, skeleton),
            )
        return self._views[key]

    def predict(self, spec: MethodSpec) -> np.ndarray:
        model = make_model(spec, self.plan)
        if spec.method in SKELETON_METHODS:
            params = spec.param_dict
            view = self.view(params["knots"], int(params["components"]))
            train = RegressionDataset(view.train_positions, self.train_cloud.responses, view.skeleton)
            model.fit(train, engine=view.engine if model.needs_distances else None)
            distances = view.test_distances(model.locality) if model.needs_distances else None
            return model.predict(view.test_positions, distances=distances)
        model.fit(self.train_cloud.points, self.train_cloud.responses)
        return model.predict(self.test_cloud.points)

    def sse(self, spec: MethodSpec) -> float:
        residual = self.test_cloud.responses - self.predict(spec)
        return float(residual @ residual)


def _contexts(
    cloud: PointCloud,
    plan: CvPlan,
    replicate: int,
    cache: SkeletonCache,
    fold_ids: Optional[np.ndarray] = None,
    dataset: str = "data",
) -> List[FoldContext]:
    if cloud.responses is None:
        raise ConfigError("cross-validation needs responses")
    if fold_ids is None:
        fold_ids = kfold_split(cloud.n, plan.n_folds, plan.seed + replicate)
    contexts = []
    for fold in range(int(fold_ids.max()) + 1):
        test = np.flatnonzero(fold_ids == fold)
        train = np.flatnonzero(fold_ids != fold)
        contexts.append(FoldContext(cloud, train, test, plan, replicate, fold, cache, dataset))
    return contexts


def cv_sse(
    spec: MethodSpec,
    data: PointCloud,
    plan: CvPlan,
    replicate: int = 0,
    cache: Optional[SkeletonCache] = None,
) -> float:
    """Total held-out squared error over the folds of the plan."""
    contexts = _contexts(data, plan, replicate, cache or SkeletonCache())
    return float(sum(context.sse(spec) for context in contexts))


def summarize(records: Sequence[SseRecord], specs: Sequence[MethodSpec]) -> ExperimentReport:
    by_spec: Dict[Tuple[str, str, str], List[float]] = {}
    for record in records:
        by_spec.setdefault((record.method, record.param_name, record.param_value), []).append(record.sse)

    summaries: Dict[str, Dict[str, SseSummary]] = {}
    best: Dict[str, BestChoice] = {}
    best_key: Dict[str, Tuple[Any, ...]] = {}
    for spec in specs:
        values = by_spec.get((spec.method, _param_names(spec), _param_values(spec)))
        if not values:
            continue
        summary = percentiles(values)
        summaries.setdefault(spec.method, {})[spec.label] = summary
        key = (summary.median, param_key(spec))
        if spec.method not in best_key or key < best_key[spec.method]:
            best_key[spec.method] = key
            best[spec.method] = BestChoice(params=spec.label, summary=summary)
    return ExperimentReport(summaries=summaries, best=best, records=list(records))


def _param_names(spec: MethodSpec) -> str:
    return ";".join(name for name, _ in spec.params)


def _param_values(spec: MethodSpec) -> str:
    return ";".join(format_value(value) for _, value in spec.params)


def run_experiment(
    gen: GenSpec,
    plan: CvPlan,
    n_replicates: int,
    cache: Optional[SkeletonCache] = None,
    n_samples: Optional[int] = None,
) -> ExperimentReport:
    """Replicate r draws its dataset with seed gen.seed + r; all methods share that replicate's folds."""
    if n_replicates < 1:
        raise ConfigError(f"n_replicates must be positive, got {n_replicates}")
    if n_samples is not None:
        gen = replace(gen, sizes=scale_sizes(gen.sizes or default_sizes(gen.dataset), n_samples))
    cache = cache or SkeletonCache()
    specs = expand_grid(plan)
    logging.info(
        f"Running {n_replicates} replicates of {gen.dataset} with {len(specs)} method settings"
    )

    records: List[SseRecord] = []
    for replicate in range(n_replicates):
        try:
            data = generate(replace(gen, seed=gen.seed + replicate))
            contexts = _contexts(data.cloud, plan, replicate, cache, dataset=gen.dataset)
            for spec in specs:
                sse = float(sum(context.sse(spec) for context in contexts))
                records.append(
                    SseRecord(spec.method, _param_names(spec), _param_values(spec), replicate, sse)
                )
                logging.debug(f"Replicate {replicate} {spec.method} {spec.label}: SSE {sse:.6g}")
        except (SkelregError, ValueError, np.linalg.LinAlgError) as e:
            raise SkelregError(f"replicate {replicate} failed: {e}") from e
        logging.info(f"Finished replicate {replicate + 1} of {n_replicates}")
    return summarize(records, specs)
