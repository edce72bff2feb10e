import math

import numpy as np
import pytest  # type: ignore

from skelreg.datagen import (
    NOISE_LABEL,
    NOISY_YINYANG_SIZES,
    YINYANG_SIZES,
    add_noise_dims,
    default_sizes,
    generate,
    scale_sizes,
    swissroll_coordinates,
    swissroll_signal,
    yinyang_signal,
)
from skelreg.errors import ConfigError
from skelreg.models import GenSpec, PointCloud


def test_scale_sizes_keeps_proportions():
    assert scale_sizes(YINYANG_SIZES, 800) == (500, 100, 100, 50, 50)
    assert sum(scale_sizes(NOISY_YINYANG_SIZES, 1001)) == 1001
    with pytest.raises(ConfigError):
        scale_sizes(YINYANG_SIZES, 3)


def test_yinyang_layout():
    data = generate(GenSpec(dataset="yinyang", seed=1))

    assert data.cloud.points.shape == (3200, 2)
    assert np.bincount(data.labels).tolist() == list(YINYANG_SIZES)
    ring = data.labels == 0
    radius = np.linalg.norm(data.cloud.points[ring], axis=1)
    assert radius.mean() == pytest.approx(3.0, abs=0.02)
    np.testing.assert_allclose(data.signal[ring], np.sin(4.0 * data.intrinsic[ring]) + 1.5)
    for label, value in ((1, 1.0), (2, 2.0), (3, 0.0), (4, 3.0)):
        assert np.all(data.signal[data.labels == label] == value)
    np.testing.assert_allclose(data.cloud.responses, data.signal + data.noise)
    # N(0, 0.01) is a variance: sd 0.1
    assert np.std(data.noise) == pytest.approx(0.1, rel=0.1)


def test_yinyang_signal_values():
    labels = np.array([0, 1, 2, 3, 4, NOISE_LABEL])
    theta = np.full(6, math.pi / 8.0)

    np.testing.assert_allclose(yinyang_signal(labels, theta), [2.5, 1.0, 2.0, 0.0, 3.0, 1.5])


def test_generation_is_seeded():
    spec = GenSpec(dataset="yinyang", sizes=(50, 10, 10, 5, 5), ambient_dim=6, seed=3)

    first, second = generate(spec), generate(spec)
    other = generate(GenSpec(dataset="yinyang", sizes=(50, 10, 10, 5, 5), ambient_dim=6, seed=4))

    np.testing.assert_array_equal(first.cloud.points, second.cloud.points)
    np.testing.assert_array_equal(first.cloud.responses, second.cloud.responses)
    assert not np.array_equal(first.cloud.points, other.cloud.points)


def test_noise_columns_leave_the_informative_ones_alone():
    small = generate(GenSpec(dataset="yinyang", sizes=(50, 10, 10, 5, 5), seed=2))
    wide = generate(GenSpec(dataset="yinyang", sizes=(50, 10, 10, 5, 5), ambient_dim=40, seed=2))

    assert wide.cloud.points.shape == (80, 40)
    np.testing.assert_array_equal(wide.cloud.points[:, :2], small.cloud.points)
    np.testing.assert_array_equal(wide.cloud.responses, small.cloud.responses)


def test_noisy_yinyang_adds_scatter():
    data = generate(GenSpec(dataset="noisy_yinyang", seed=0))

    scatter = data.labels == NOISE_LABEL
    assert scatter.sum() == 800
    assert data.cloud.n == 4000
    assert np.all(np.abs(data.cloud.points[scatter]) <= 3.5)
    assert np.all(data.signal[scatter] == 1.5)


def test_swissroll():
    data = generate(GenSpec(dataset="swissroll", ambient_dim=5, seed=0))

    assert data.cloud.points.shape == (2000, 5)
    theta, x2 = data.intrinsic[:, 0], data.intrinsic[:, 1]
    assert theta.min() >= math.pi and theta.max() <= 3.0 * math.pi
    assert x2.min() >= 0.0 and x2.max() <= 4.0 * math.pi
    gated = (x2 < math.pi) | ((2.0 * math.pi < x2) & (x2 < 3.0 * math.pi))
    assert np.all(data.signal[~gated] == 0.0)
    np.testing.assert_allclose(data.signal[gated], 0.1 * (theta[gated] - 2.0 * math.pi) ** 3)
    # response noise N(0, 0.3) is a variance
    assert np.std(data.noise) == pytest.approx(math.sqrt(0.3), rel=0.1)


def test_swissroll_coordinates_and_signal():
    points = swissroll_coordinates(np.array([0.0, 1.0]), np.array([0.5, 0.25]), width=8.0)

    np.testing.assert_allclose(points, [[-math.pi, 4.0, 0.0], [-3.0 * math.pi, 2.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(swissroll_signal(np.array([3.0 * math.pi]), np.array([1.0])), [0.1 * math.pi**3])


def test_standard_deviation_notation():
    spec = GenSpec(dataset="swissroll", sizes=(4000,), noise_sd=0.5, variance_notation=False, seed=1)

    assert np.std(generate(spec).noise) == pytest.approx(0.5, rel=0.05)


def test_add_noise_dims():
    cloud = PointCloud(np.zeros((10000, 1)), np.zeros(10000))

    wide = add_noise_dims(cloud, 3, 0.1, seed=0)

    assert wide.dim == 3
    assert np.var(wide.points[:, 1:], axis=0) == pytest.approx([0.01, 0.01], rel=0.05)
    assert add_noise_dims(cloud, 1, 0.1, seed=0) is cloud
    with pytest.raises(ConfigError):
        add_noise_dims(wide, 2, 0.1, seed=0)


def test_generator_errors():
    with pytest.raises(ConfigError):
        generate(GenSpec(dataset="moons"))
    with pytest.raises(ConfigError):
        generate(GenSpec(dataset="swissroll", ambient_dim=2))
    with pytest.raises(ConfigError):
        generate(GenSpec(dataset="yinyang", sizes=(10, 10)))
    with pytest.raises(ConfigError):
        default_sizes("moons")


def test_noise_columns_scaled_to_a_reference_dimension():
    sizes = (2000, 400, 400, 200, 200)
    plain = generate(GenSpec(dataset="yinyang", sizes=sizes, ambient_dim=50, seed=5))
    scaled = generate(GenSpec(dataset="yinyang", sizes=sizes, ambient_dim=50, noise_reference_dim=1000, seed=5))

    # 48 columns of variance v * sqrt(998 / 48) spread squared distances like 998 columns of variance v
    assert np.var(plain.cloud.points[:, 2:]) == pytest.approx(0.01, rel=0.05)
    assert np.var(scaled.cloud.points[:, 2:]) == pytest.approx(0.01 * math.sqrt(998 / 48), rel=0.05)
    np.testing.assert_array_equal(scaled.cloud.points[:, :2], plain.cloud.points[:, :2])
    unchanged = generate(GenSpec(dataset="yinyang", sizes=sizes, noise_reference_dim=1000, seed=5))
    assert unchanged.cloud.dim == 2
    with pytest.raises(ConfigError):
        generate(GenSpec(dataset="swissroll", ambient_dim=10, noise_reference_dim=3))
