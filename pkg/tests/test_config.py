from pathlib import Path

import pytest  # type: ignore

from skelreg.config import load_config, parse_config
from skelreg.errors import ConfigError

FIXTURES_DIR = Path(__file__).parent / "fixtures"
REPO_CONFIG = Path(__file__).parent.parent / "config.yml"


def test_load_fixture_config():
    config = load_config(FIXTURES_DIR / "experiment.yml")

    assert config.replicates == 2
    assert config.gen.dataset == "yinyang"
    assert config.gen.sizes == (60, 12, 12, 8, 8)
    assert config.gen.ambient_dim == 4
    assert config.gen.noise_sd == 0.04
    assert config.gen.seed == 3
    assert config.gen.geometry.ring_radius == 2.5
    assert config.gen.geometry.upper_left_center == (-1.5, 1.5)
    assert config.gen.geometry.cluster_sd == 0.2

    plan = config.plan
    assert plan.n_folds == 3
    assert plan.seed == 3
    assert plan.knots == [8]
    assert plan.components == [2]
    assert plan.methods == ["skernel", "sknn", "slspline", "knn", "ridge", "mean"]
    assert plan.grid["sknn"] == {"k": [3, 6]}
    assert "knots" not in plan.grid
    assert plan.build.restarts == 2
    assert plan.build.max_iter == 50
    assert plan.build.seed == 3


def test_repository_config_is_valid():
    config = load_config(REPO_CONFIG)

    assert config.n_samples == 800
    assert config.gen.ambient_dim == 50
    assert config.plan.knots == [38]
    assert config.plan.components == [5]
    assert config.gen.noise_reference_dim == 1000
    assert config.gen.geometry.cluster_sd == 0.15
    assert config.gen.geometry.ring_radius == 3.0


def test_defaults():
    config = parse_config({})

    assert config.gen.dataset == "yinyang"
    assert config.gen.sizes is None
    assert config.replicates == 1
    assert config.plan.n_folds == 5
    assert config.plan.knots == [None]
    assert config.plan.locality and config.plan.fallback


def test_explicit_build_seed_wins():
    config = parse_config({"seed": 4, "build": {"seed": 9}})

    assert config.plan.build.seed == 9
    assert config.gen.seed == 4


@pytest.mark.parametrize(
    "data",
    [
        {"colour": "red"},
        {"dataset": {"name": "yinyang", "radius": 3}},
        {"build": {"n_knots": 10}},
        {"dataset": {"geometry": {"spiral": 1}}},
        {"grid": {"sknn": [3, 6]}},
        {"dataset": "yinyang"},
        {"replicates": 0},
    ],
)
def test_invalid_configs(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_load_config_wraps_type_errors(tmp_path):
    path = tmp_path / "bad.yml"
    path.write_text("folds: five\n")

    with pytest.raises(ConfigError, match="bad.yml"):
        load_config(path)
