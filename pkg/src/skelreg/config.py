from dataclasses import fields
from pathlib import Path
from typing import Any, Dict, Iterable

import yaml  # type: ignore

from .errors import ConfigError
from .models import BuildConfig, CvPlan, ExperimentConfig, GenSpec, YinyangGeometry

_TOP_LEVEL = {"dataset", "replicates", "seed", "folds", "build", "grid", "methods", "locality", "fallback"}
_DATASET_KEYS = {
    "name",
    "sizes",
    "n_samples",
    "ambient_dim",
    "noise_sd",
    "noise_dim_sd",
    "noise_reference_dim",
    "variance_notation",
    "width",
    "geometry",
}
_BUILD_KEYS = {f.name for f in fields(BuildConfig)} - {"n_knots", "n_components"}


def _check_keys(section: str, data: Dict[str, Any], allowed: Iterable[str]) -> None:
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"Unknown keys in {section}: {sorted(unknown)}")


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    value = data.get(name) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{name}' must be a mapping, got {type(value).__name__}")
    return value


def parse_config(data: Dict[str, Any]) -> ExperimentConfig:
    """Builds an experiment configuration from the parsed YAML document."""
    if not isinstance(data, dict):
        raise ConfigError("the configuration must be a mapping")
    _check_keys("the configuration", data, _TOP_LEVEL)
    seed = int(data.get("seed", 0))

    dataset = _section(data, "dataset")
    _check_keys("dataset", dataset, _DATASET_KEYS)
    geometry = _section(dataset, "geometry")
    _check_keys("dataset.geometry", geometry, {f.name for f in fields(YinyangGeometry)})
    gen = GenSpec(
        dataset=dataset.get("name", "yinyang"),
        sizes=tuple(dataset["sizes"]) if dataset.get("sizes") else None,
        ambient_dim=dataset.get("ambient_dim"),
        noise_sd=dataset.get("noise_sd"),
        noise_dim_sd=dataset.get("noise_dim_sd"),
        noise_reference_dim=dataset.get("noise_reference_dim"),
        seed=seed,
        variance_notation=dataset.get("variance_notation", True),
        geometry=YinyangGeometry(**{k: tuple(v) if isinstance(v, list) else v for k, v in geometry.items()}),
    )
    if "width" in dataset:
        gen.width = float(dataset["width"])

    build = _section(data, "build")
    _check_keys("build", build, _BUILD_KEYS)
    grid = dict(_section(data, "grid"))
    knots = grid.pop("knots", [None])
    components = grid.pop("components", [1])
    for method, params in grid.items():
        if not isinstance(params, dict):
            raise ConfigError(f"grid.{method} must map parameter names to lists")
    plan = CvPlan(
        n_folds=int(data.get("folds", 5)),
        seed=seed,
        grid=grid,
        knots=list(knots),
        components=[int(c) for c in components],
        build=BuildConfig(**build, seed=seed) if "seed" not in build else BuildConfig(**build),
        locality=bool(data.get("locality", True)),
        fallback=bool(data.get("fallback", True)),
    )
    if "methods" in data:
        plan.methods = list(data["methods"])
    replicates = int(data.get("replicates", 1))
    if replicates < 1:
        raise ConfigError(f"replicates must be positive, got {replicates}")
    return ExperimentConfig(gen=gen, plan=plan, replicates=replicates, n_samples=dataset.get("n_samples"))


def load_config(config_path: Path) -> ExperimentConfig:
    """Loads and returns the YAML experiment configuration from the given path."""
    with open(config_path, "r") as f:
        data = yaml.safe_load(f)
    try:
        return parse_config(data or {})
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid configuration in {config_path}: {e}") from e
