import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from .builder import build_skeleton
from .caching import SkeletonCache
from .config import load_config
from .datagen import default_sizes, generate, scale_sizes
from .errors import ConfigError, SkelregError
from .harness import run_experiment
from .models import BuildConfig, GenSpec, KnnSpec, PointCloud, RegressionDataset
from .projection import project_all
from .regressors import (
    SKELETON_METHODS,
    EuclideanKnnRegressor,
    LassoRegressor,
    MeanRegressor,
    RidgeRegressor,
    SkeletonKernelRegressor,
    SkeletonKnnRegressor,
    SkeletonSplineRegressor,
    parse_bandwidth,
)
from .reporting import print_experiment_report, print_skeleton_summary
from .storage import (
    load_model,
    load_skeleton,
    read_dataset_csv,
    read_positions_csv,
    save_model,
    save_skeleton,
    write_dataset_csv,
    write_plot_csv,
    write_positions_csv,
    write_predictions_csv,
    write_report_json,
)
from .utils import CACHE_DIR

METHODS = ("skernel", "sknn", "slspline", "knn", "ridge", "lasso", "mean")


def parse_params(text: Optional[str]) -> Dict[str, str]:
    """Parses "name=value,name=value" into a dict of strings."""
    params: Dict[str, str] = {}
    if not text:
        return params
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise ConfigError(f"Expected name=value in --params, got '{item}'")
        name, value = item.split("=", 1)
        params[name.strip()] = value.strip()
    return params


def _model_for(args: argparse.Namespace) -> Any:
    params = parse_params(args.params)
    method = args.method
    try:
        if method == "skernel":
            spec = parse_bandwidth(params.get("bandwidth", "1rhns"), params.get("family", "gaussian"))
            return SkeletonKernelRegressor(spec, locality=args.locality, fallback=args.fallback)
        if method == "sknn":
            return SkeletonKnnRegressor(
                KnnSpec(int(params.get("k", 5))), locality=args.locality, fallback=args.fallback
            )
        if method == "slspline":
            return SkeletonSplineRegressor(args.penalty, args.order, args.lam, fallback=args.fallback)
        if method == "knn":
            return EuclideanKnnRegressor(int(params.get("k", 5)))
        if method == "ridge":
            return RidgeRegressor(args.lam)
        if method == "lasso":
            return LassoRegressor(args.lam)
        return MeanRegressor()
    except ValueError as e:
        raise ConfigError(f"Invalid parameters for {method}: {e}") from e


def cmd_build(args: argparse.Namespace) -> None:
    X, y, _ = read_dataset_csv(args.input)
    cfg = BuildConfig(
        n_knots=args.knots,
        restarts=args.restarts,
        min_cell=args.min_cell,
        n_components=args.components,
        linkage=args.linkage,
        seed=args.seed,
    )
    skeleton = build_skeleton(PointCloud(X, y), cfg)
    save_skeleton(args.output, skeleton)
    print_skeleton_summary(skeleton)


def cmd_project(args: argparse.Namespace) -> None:
    skeleton = load_skeleton(args.skeleton)
    X, _, _ = read_dataset_csv(args.input)
    write_positions_csv(args.output, project_all(X, skeleton))
    logging.info(f"Projected {X.shape[0]} points onto {args.skeleton}")


def cmd_fit(args: argparse.Namespace) -> None:
    X, y, _ = read_dataset_csv(args.train)
    if y is None:
        raise ConfigError(f"{args.train} has no y column")
    model = _model_for(args)
    if args.method in SKELETON_METHODS:
        if args.skeleton is None:
            raise ConfigError(f"--skeleton is required for {args.method}")
        skeleton = load_skeleton(args.skeleton)
        model.fit(RegressionDataset(project_all(X, skeleton), y, skeleton))
    else:
        model.fit(X, y)
    save_model(args.output, model)


def cmd_predict(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    if (args.input is None) == (args.positions is None):
        raise ConfigError("predict needs exactly one of --input and --positions")
    if args.positions is not None:
        if model.method not in SKELETON_METHODS:
            raise ConfigError(f"--positions only applies to skeleton methods, not {model.method}")
        predictions = model.predict(read_positions_csv(args.positions))
    else:
        X, _, _ = read_dataset_csv(args.input)
        predictions = model.predict(project_all(X, model.train.skeleton) if model.method in SKELETON_METHODS else X)
    write_predictions_csv(args.output, predictions)
    logging.info(f"Wrote {len(predictions)} predictions to {args.output}")


def cmd_simulate(args: argparse.Namespace) -> None:
    spec = GenSpec(
        dataset=args.dataset,
        ambient_dim=args.ambient_dim,
        noise_reference_dim=args.noise_reference_dim,
        seed=args.seed,
    )
    if args.n_samples is not None:
        spec.sizes = scale_sizes(default_sizes(args.dataset), args.n_samples)
    data = generate(spec)
    write_dataset_csv(args.output, data.cloud.points, data.cloud.responses, data.labels)


def cmd_cv(args: argparse.Namespace) -> None:
    config = load_config(args.config)
    cache = SkeletonCache(args.cache_dir, force_refresh=args.no_cache)
    report = run_experiment(config.gen, config.plan, config.replicates, cache=cache, n_samples=config.n_samples)
    if args.output:
        write_report_json(args.output, report)
    if args.plot_csv:
        write_plot_csv(args.plot_csv, report.records)
    if args.markdown or not args.output:
        print_experiment_report(report, title=f"{config.gen.dataset}: {config.replicates} replicates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Skeleton regression: graph skeletons of point clouds and regression on them."
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        help="Enable verbose logging (DEBUG level)",
    )
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    build = commands.add_parser("build", help="Build a skeleton from a point cloud CSV.")
    build.add_argument("--input", type=Path, required=True, help="CSV with columns x1..xd.")
    build.add_argument("--output", type=Path, required=True, help="Skeleton JSON to write.")
    build.add_argument("--knots", type=int, help="Number of knots (default: round(sqrt(n))).")
    build.add_argument("--components", type=int, default=1, help="Number of disjoint components.")
    build.add_argument("--restarts", type=int, default=100, help="k-means restarts.")
    build.add_argument("--min-cell", type=int, default=0, help="Drop knots with fewer points.")
    build.add_argument("--linkage", choices=("single", "average"), default="single")
    build.add_argument("--seed", type=int, default=0)
    build.set_defaults(func=cmd_build)

    project = commands.add_parser("project", help="Project points onto a skeleton.")
    project.add_argument("--skeleton", type=Path, required=True)
    project.add_argument("--input", type=Path, required=True)
    project.add_argument("--output", type=Path, required=True)
    project.set_defaults(func=cmd_project)

    fit = commands.add_parser("fit", help="Fit a regressor and save it as JSON.")
    fit.add_argument("--method", choices=METHODS, required=True)
    fit.add_argument("--skeleton", type=Path, help="Skeleton JSON (skeleton methods only).")
    fit.add_argument("--train", type=Path, required=True, help="CSV with x1..xd and y.")
    fit.add_argument("--params", help='Method parameters, e.g. "bandwidth=4rhns" or "k=9".')
    fit.add_argument("--penalty", choices=("none", "lapsmooth", "trendfilter"), default="none")
    fit.add_argument("--order", type=int, default=0, help="Trend order q of the graph penalty.")
    fit.add_argument("--lambda", dest="lam", type=float, default=0.0, help="Penalty weight.")
    fit.add_argument("--locality", action="store_true", help="Only compare positions sharing a knot.")
    fit.add_argument(
        "--fallback",
        action="store_true",
        help="Predict the component mean where a query has no training support.",
    )
    fit.add_argument("--output", type=Path, required=True, help="Model JSON to write.")
    fit.set_defaults(func=cmd_fit)

    predict = commands.add_parser("predict", help="Predict with a saved model.")
    predict.add_argument("--model", type=Path, required=True)
    predict.add_argument("--input", type=Path, help="Covariate CSV to predict at.")
    predict.add_argument(
        "--positions",
        type=Path,
        help="Skeleton positions CSV written by the project command, used instead of --input.",
    )
    predict.add_argument("--output", type=Path, required=True)
    predict.set_defaults(func=cmd_predict)

    simulate = commands.add_parser("simulate", help="Generate a synthetic dataset.")
    simulate.add_argument("--dataset", choices=("yinyang", "noisy_yinyang", "swissroll"), required=True)
    simulate.add_argument("--ambient-dim", type=int, help="Total number of covariates.")
    simulate.add_argument("--n-samples", type=int, help="Rescale the component sizes to this total.")
    simulate.add_argument(
        "--noise-reference-dim",
        type=int,
        help="Scale the noise columns so they disturb distances as much as in this many dimensions.",
    )
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--output", type=Path, required=True)
    simulate.set_defaults(func=cmd_simulate)

    cv = commands.add_parser("cv", help="Run a cross-validated experiment from a YAML config.")
    cv.add_argument("--config", type=Path, default=Path("config.yml"))
    cv.add_argument("--output", type=Path, help="Report JSON to write.")
    cv.add_argument("--plot-csv", type=Path, help="Long-format per-replicate SSE CSV to write.")
    cv.add_argument("--markdown", action="store_true", help="Print the summary as a markdown table.")
    cv.add_argument(
        "--no-cache",
        action="store_true",
        help="Ignore cached per-fold skeletons and rebuild them.",
    )
    cv.add_argument(
        "--cache-dir",
        type=Path,
        default=CACHE_DIR,
        help=f"Directory for cached per-fold skeletons (default: {CACHE_DIR}).",
    )
    cv.set_defaults(func=cmd_cv)
    return parser


def main(argv: Optional[List[str]] = None) -> None:
    # Configure logging
    log = logging.getLogger()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(asctime)s - %(levelname)s - %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO)

    args = build_parser().parse_args(argv)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
        logging.debug("Verbose logging enabled.")

    try:
        args.func(args)
    except SkelregError as e:
        logging.error(str(e))
        sys.exit(1)
    except OSError as e:
        logging.error(f"{e.filename or 'file'}: {e.strerror or e}")
        sys.exit(1)
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    main()
