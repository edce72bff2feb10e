from unittest.mock import patch

import numpy as np
import pytest  # type: ignore

from skelreg.builder import build_skeleton
from skelreg.caching import SkeletonCache
from skelreg.errors import ConfigError, SkelregError
from skelreg.harness import (
    cv_sse,
    expand_grid,
    kfold_split,
    make_model,
    percentiles,
    run_experiment,
    summarize,
)
from skelreg.models import BuildConfig, CvPlan, GenSpec, MethodSpec, PointCloud, SseRecord
from skelreg.regressors import SkeletonKernelRegressor, SkeletonSplineRegressor

SMALL_YINYANG = GenSpec(dataset="yinyang", sizes=(60, 12, 12, 8, 8), ambient_dim=4, seed=5)


def small_plan(**overrides):
    settings = dict(
        n_folds=3,
        seed=2,
        methods=["skernel", "sknn", "slspline", "knn", "mean"],
        grid={"skernel": {"bandwidth_rhns": [1.0, 2.0]}, "sknn": {"k": [3, 6]}, "knn": {"k": [3]}},
        knots=[8],
        components=[2],
        build=BuildConfig(restarts=2),
    )
    settings.update(overrides)
    return CvPlan(**settings)


def test_kfold_split_sizes():
    assert np.bincount(kfold_split(10, 5, 0)).tolist() == [2, 2, 2, 2, 2]
    assert sorted(np.bincount(kfold_split(11, 5, 0)).tolist()) == [2, 2, 2, 2, 3]
    np.testing.assert_array_equal(kfold_split(11, 5, 3), kfold_split(11, 5, 3))
    with pytest.raises(ConfigError):
        kfold_split(4, 5, 0)
    with pytest.raises(ConfigError):
        kfold_split(4, 1, 0)


def test_percentiles_match_sorted_interpolation():
    rng = np.random.default_rng(0)
    values = rng.normal(size=37)

    summary = percentiles(values)

    ordered = np.sort(values)

    def interpolated(q):
        position = q * (len(ordered) - 1)
        low = int(np.floor(position))
        high = min(low + 1, len(ordered) - 1)
        return ordered[low] + (position - low) * (ordered[high] - ordered[low])

    assert summary.median == pytest.approx(interpolated(0.5))
    assert summary.p5 == pytest.approx(interpolated(0.05))
    assert summary.p95 == pytest.approx(interpolated(0.95))
    assert summary.p5 <= summary.median <= summary.p95
    single = percentiles([4.0])
    assert (single.median, single.p5, single.p95) == (4.0, 4.0, 4.0)


def test_expand_grid_prefixes_skeleton_settings():
    plan = CvPlan(
        methods=["slspline", "knn"],
        grid={
            "slspline": {"penalty": ["none", "lapsmooth"], "order": [0, 1], "lambda": [0.1]},
            "knn": {"k": [3, 5]},
        },
        knots=[None, 12],
        components=[1],
    )

    labels = [spec.label for spec in expand_grid(plan)]

    assert labels == [
        "knots=auto,components=1,penalty=none",
        "knots=auto,components=1,penalty=lapsmooth,order=0,lambda=0.1",
        "knots=auto,components=1,penalty=lapsmooth,order=1,lambda=0.1",
        "knots=12,components=1,penalty=none",
        "knots=12,components=1,penalty=lapsmooth,order=0,lambda=0.1",
        "knots=12,components=1,penalty=lapsmooth,order=1,lambda=0.1",
        "k=3",
        "k=5",
    ]


def test_expand_grid_rejects_bad_grids():
    with pytest.raises(ConfigError):
        expand_grid(CvPlan(methods=["svm"]))
    with pytest.raises(ConfigError):
        expand_grid(CvPlan(methods=["knn"], grid={"knn": {"k": [3], "p": [2]}}))
    with pytest.raises(ConfigError):
        expand_grid(CvPlan(methods=["knn"], grid={"knn": {"k": []}}))
    with pytest.raises(ConfigError):
        expand_grid(
            CvPlan(methods=["skernel"], grid={"skernel": {"bandwidth": [0.1], "bandwidth_rhns": [1.0]}})
        )
    with pytest.raises(ConfigError):
        expand_grid(CvPlan(methods=["skernel"], grid={"skernel": {"family": ["gaussian"]}}))


def test_make_model():
    plan = CvPlan(locality=False, fallback=True)

    kernel = make_model(MethodSpec("skernel", (("knots", 5), ("components", 1), ("bandwidth", 0.4))), plan)
    spline = make_model(MethodSpec("slspline", (("penalty", "trendfilter"), ("order", 2), ("lambda", 0.01))), plan)

    assert isinstance(kernel, SkeletonKernelRegressor)
    assert not kernel.spec.relative and kernel.spec.bandwidth == 0.4 and kernel.fallback
    assert isinstance(spline, SkeletonSplineRegressor)
    assert (spline.penalty, spline.order, spline.lam) == ("trendfilter", 2, 0.01)


def test_mean_baseline_sse_has_a_closed_form():
    rng = np.random.default_rng(1)
    cloud = PointCloud(rng.normal(size=(23, 2)), rng.normal(size=23))
    plan = CvPlan(n_folds=4, seed=9)

    sse = cv_sse(MethodSpec("mean"), cloud, plan, replicate=2)

    folds = kfold_split(23, 4, 9 + 2)
    expected = 0.0
    for fold in range(4):
        test, train = folds == fold, folds != fold
        expected += float(np.sum((cloud.responses[test] - cloud.responses[train].mean()) ** 2))
    assert sse == pytest.approx(expected, rel=1e-12)


def test_constant_responses_give_zero_error():
    rng = np.random.default_rng(2)
    cloud = PointCloud(rng.normal(size=(40, 2)), np.full(40, 3.0))
    plan = small_plan()

    for spec in expand_grid(plan):
        assert cv_sse(spec, cloud, plan) == pytest.approx(0.0, abs=1e-16), spec.label


def test_fold_skeletons_only_see_training_rows():
    rng = np.random.default_rng(3)
    cloud = PointCloud(rng.normal(size=(30, 2)), rng.normal(size=30))
    plan = small_plan(n_folds=3, seed=4)
    folds = kfold_split(30, 3, 4)
    spec = MethodSpec("sknn", (("knots", 5), ("components", 1), ("k", 3)))

    with patch("skelreg.caching.build_skeleton", wraps=build_skeleton) as mock_build:
        cv_sse(spec, cloud, plan)

    assert mock_build.call_count == 3
    for call, fold in zip(mock_build.call_args_list, range(3)):
        used, cfg = call.args
        np.testing.assert_array_equal(used.points, cloud.points[folds != fold])
        assert cfg.n_knots == 5
        assert cfg.seed == plan.build.seed + fold


def test_run_experiment_is_deterministic():
    plan = small_plan()

    first = run_experiment(SMALL_YINYANG, plan, 2)
    second = run_experiment(SMALL_YINYANG, plan, 2)

    assert [r.sse for r in first.records] == [r.sse for r in second.records]
    assert first.best.keys() == {"skernel", "sknn", "slspline", "knn", "mean"}
    assert len(first.records) == 2 * len(expand_grid(plan))
    for method, rows in first.summaries.items():
        for summary in rows.values():
            assert summary.p5 <= summary.median <= summary.p95


def test_run_experiment_reuses_cached_skeletons():
    plan = small_plan(methods=["sknn"])
    cache = SkeletonCache()

    run_experiment(SMALL_YINYANG, plan, 1, cache=cache)
    assert (cache.hits, cache.misses) == (0, 3)

    run_experiment(SMALL_YINYANG, plan, 1, cache=cache)
    assert (cache.hits, cache.misses) == (3, 3)


def test_run_experiment_rescales_sizes():
    plan = small_plan(methods=["mean"])

    report = run_experiment(GenSpec(dataset="swissroll", seed=1), plan, 1, n_samples=45)

    assert len(report.records) == 1
    assert report.records[0].param_name == ""


def test_single_replicate_summary_is_degenerate():
    report = run_experiment(SMALL_YINYANG, small_plan(methods=["mean"]), 1)

    summary = report.best["mean"].summary
    assert summary.median == summary.p5 == summary.p95 == report.records[0].sse


def test_best_setting_prefers_smaller_parameters_on_ties():
    specs = [MethodSpec("knn", (("k", k),)) for k in (10, 9, 12)]
    records = [SseRecord("knn", "k", str(k), replicate, 5.0) for k in (10, 9, 12) for replicate in range(3)]

    report = summarize(records, specs)

    assert report.best["knn"].params == "k=9"
    assert report.best["knn"].summary.median == 5.0
    assert set(report.summaries["knn"]) == {"k=10", "k=9", "k=12"}


def test_best_setting_has_the_lowest_median():
    specs = [MethodSpec("ridge", (("lambda", lam),)) for lam in (0.1, 1.0)]
    records = [
        SseRecord("ridge", "lambda", "0.1", 0, 3.0),
        SseRecord("ridge", "lambda", "0.1", 1, 9.0),
        SseRecord("ridge", "lambda", "1.0", 0, 4.0),
        SseRecord("ridge", "lambda", "1.0", 1, 4.0),
    ]

    report = summarize(records, specs)

    assert report.best["ridge"].params == "lambda=1.0"
    assert report.summaries["ridge"]["lambda=0.1"].median == pytest.approx(6.0)


def test_replicate_failures_name_the_replicate():
    with patch("skelreg.harness.generate", side_effect=ConfigError("bad sizes")):
        with pytest.raises(SkelregError, match="replicate 0 failed: bad sizes"):
            run_experiment(SMALL_YINYANG, small_plan(), 3)

    with pytest.raises(ConfigError):
        run_experiment(SMALL_YINYANG, small_plan(), 0)
