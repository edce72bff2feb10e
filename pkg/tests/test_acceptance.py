"""End-to-end experiments at desk scale. Deselected by default; run with `pytest -m slow`."""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest  # type: ignore

from skelreg.config import load_config
from skelreg.harness import run_experiment
from skelreg.models import EdgePosition, GenSpec, KernelSpec, RegressionDataset
from skelreg.regressors import SkeletonKernelRegressor

from .skeletons import chain_skeleton

pytestmark = pytest.mark.slow

REPO_CONFIG = Path(__file__).parent.parent / "config.yml"


def edge_signal(t):
    return np.abs(t - 0.4) + 0.5 * t


def edge_error(n, seed):
    rng = np.random.default_rng(seed)
    skeleton = chain_skeleton([1.0])
    t = rng.uniform(0.001, 0.999, n)
    y = edge_signal(t) + rng.normal(0.0, 0.3, n)
    model = SkeletonKernelRegressor(KernelSpec("gaussian", 0.5 * n ** (-1.0 / 3.0)))
    model.fit(RegressionDataset([EdgePosition(0, float(s)) for s in t], y, skeleton))
    grid = np.linspace(0.05, 0.95, 91)
    predicted = model.predict([EdgePosition(0, float(s)) for s in grid])
    return float(np.mean((predicted - edge_signal(grid)) ** 2))


def test_edge_error_decreases_with_sample_size():
    errors = [np.mean([edge_error(n, seed) for seed in range(20)]) for n in (250, 1000, 4000)]

    assert errors[0] > errors[1] > errors[2]


def yinyang_report(methods, grid=None):
    config = load_config(REPO_CONFIG)
    plan = replace(config.plan, methods=methods, grid=grid if grid is not None else config.plan.grid)
    return run_experiment(config.gen, plan, config.replicates, n_samples=config.n_samples)


def test_skeleton_methods_beat_euclidean_knn_on_yinyang():
    report = yinyang_report(["skernel", "sknn", "slspline", "knn"])

    baseline = report.best["knn"].summary.median
    for method in ("skernel", "sknn", "slspline"):
        assert report.best[method].summary.median <= 0.7 * baseline, method


def test_skeleton_kernel_beats_euclidean_knn_on_swissroll():
    config = load_config(REPO_CONFIG)
    plan = replace(config.plan, methods=["skernel", "knn"], knots=[15, 22, 30], components=[1])
    gen = GenSpec(dataset="swissroll", ambient_dim=50, noise_reference_dim=1000, seed=0)

    report = run_experiment(gen, plan, 5, n_samples=600)

    assert report.best["skernel"].summary.median <= 0.9 * report.best["knn"].summary.median


def test_penalties_do_not_improve_the_linear_spline():
    grid = {
        "slspline": {
            "penalty": ["none", "lapsmooth", "trendfilter"],
            "order": [0, 1, 2],
            "lambda": [0.001, 0.01, 0.1],
        }
    }

    report = yinyang_report(["slspline"], grid)

    rows = report.summaries["slspline"]
    plain = next(summary.median for label, summary in rows.items() if label.endswith("penalty=none"))
    penalized = min(summary.median for label, summary in rows.items() if not label.endswith("penalty=none"))
    assert abs(plain - penalized) <= 0.05 * penalized
