"""Seeded generators for the synthetic regression benchmarks."""

import logging
import math
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigError
from .models import GenSpec, PointCloud, SimulatedData, YinyangGeometry
from .utils import child_seeds

YINYANG_SIZES = (2000, 400, 400, 200, 200)
NOISY_YINYANG_SIZES = YINYANG_SIZES + (800,)
SWISSROLL_SIZES = (2000,)

# Stated N(0, v) parameters: response noise and appended noise columns.
_DEFAULTS = {
    "yinyang": (0.01, 0.01),
    "noisy_yinyang": (0.01, 0.01),
    "swissroll": (0.3, 0.1),
}
_INTRINSIC_DIM = {"yinyang": 2, "noisy_yinyang": 2, "swissroll": 3}
NOISE_LABEL = -1


def scale_sizes(sizes: Sequence[int], total: int) -> Tuple[int, ...]:
    """Rescales component sizes to sum to total, keeping proportions (largest remainder rounding)."""
    sizes = np.asarray(sizes, dtype=float)
    if total < len(sizes):
        raise ConfigError(f"n_samples={total} is smaller than the {len(sizes)} components")
    exact = sizes / sizes.sum() * total
    counts = np.floor(exact).astype(int)
    remainder = total - counts.sum()
    order = np.argsort(-(exact - counts), kind="stable")
    counts[order[:remainder]] += 1
    counts = np.maximum(counts, 1)
    while counts.sum() > total:
        counts[np.argmax(counts)] -= 1
    return tuple(int(c) for c in counts)


def _sd(value: float, variance_notation: bool) -> float:
    return math.sqrt(value) if variance_notation else value


def _noise_levels(spec: GenSpec) -> Tuple[float, float]:
    response, columns = _DEFAULTS[spec.dataset]
    if spec.noise_sd is not None:
        response = spec.noise_sd
    if spec.noise_dim_sd is not None:
        columns = spec.noise_dim_sd
    column_sd = _sd(columns, spec.variance_notation) * _reference_scale(spec)
    return _sd(response, spec.variance_notation), column_sd


def _reference_scale(spec: GenSpec) -> float:
    """Factor on the noise-column sd that matches the reference dimension's distance noise.

    m columns of variance v add m*v to every squared distance, with a spread
    proportional to v*sqrt(m). Keeping v*sqrt(m) fixed lets a few columns
    disturb neighbourhoods as much as many columns at the stated level.
    """
    if spec.noise_reference_dim is None or spec.ambient_dim is None:
        return 1.0
    intrinsic = _INTRINSIC_DIM[spec.dataset]
    columns = spec.ambient_dim - intrinsic
    reference = spec.noise_reference_dim - intrinsic
    if reference < 1:
        raise ConfigError(
            f"noise_reference_dim must exceed the intrinsic dimension {intrinsic}, got {spec.noise_reference_dim}"
        )
    if columns < 1:
        return 1.0
    return (reference / columns) ** 0.25


def yinyang_signal(labels: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Noiseless Yinyang response from component labels and ring angles."""
    constants = {1: 1.0, 2: 2.0, 3: 0.0, 4: 3.0, NOISE_LABEL: 1.5}
    signal = np.sin(4.0 * theta) + 1.5
    for label, value in constants.items():
        signal = np.where(labels == label, value, signal)
    return signal


def _yinyang_covariates(
    sizes: Sequence[int], geometry: YinyangGeometry, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    ring, right, left, bottom_right, upper_left = sizes[:5]
    blocks, labels, angles = [], [], []

    theta = rng.uniform(0.0, 2.0 * math.pi, ring)
    radius = geometry.ring_radius + rng.normal(0.0, geometry.ring_jitter_sd, ring)
    blocks.append(np.column_stack([radius * np.cos(theta), radius * np.sin(theta)]))
    angles.append(theta)

    for count, center, arc in (
        (right, geometry.right_moon_center, (0.0, math.pi)),
        (left, geometry.left_moon_center, (math.pi, 2.0 * math.pi)),
    ):
        alpha = rng.uniform(arc[0], arc[1], count)
        r = rng.uniform(geometry.moon_radius_from, geometry.moon_radius_to, count)
        blocks.append(np.column_stack([center[0] + r * np.cos(alpha), center[1] + r * np.sin(alpha)]))
        angles.append(alpha)

    for count, center in (
        (bottom_right, geometry.bottom_right_center),
        (upper_left, geometry.upper_left_center),
    ):
        blocks.append(rng.normal(0.0, geometry.cluster_sd, (count, 2)) + np.asarray(center))
        angles.append(np.zeros(count))

    for label, count in enumerate(sizes[:5]):
        labels.append(np.full(count, label, dtype=int))
    return np.vstack(blocks), np.concatenate(labels), np.concatenate(angles)


def _finish(
    spec: GenSpec,
    covariates: np.ndarray,
    labels: np.ndarray,
    intrinsic: np.ndarray,
    signal: np.ndarray,
    noise_sd: float,
    rng: np.random.Generator,
    noise_dim_sd: float,
    dims_seed: np.random.SeedSequence,
) -> SimulatedData:
    noise = rng.normal(0.0, noise_sd, covariates.shape[0])
    cloud = PointCloud(covariates, signal + noise)
    target = spec.ambient_dim if spec.ambient_dim is not None else covariates.shape[1]
    cloud = add_noise_dims(cloud, target, noise_dim_sd, dims_seed)
    logging.info(f"Generated {spec.dataset} data: {cloud.n} points in {cloud.dim} dimensions")
    return SimulatedData(cloud=cloud, labels=labels, intrinsic=intrinsic, noise=noise, signal=signal)


def gen_yinyang(spec: GenSpec) -> SimulatedData:
    sizes = tuple(spec.sizes) if spec.sizes is not None else YINYANG_SIZES
    _check_sizes(sizes, 5)
    noise_sd, noise_dim_sd = _noise_levels(spec)
    data_seed, dims_seed = child_seeds(spec.seed, 2)
    rng = np.random.default_rng(data_seed)
    covariates, labels, theta = _yinyang_covariates(sizes, spec.geometry, rng)
    signal = yinyang_signal(labels, theta)
    return _finish(spec, covariates, labels, theta, signal, noise_sd, rng, noise_dim_sd, dims_seed)


def gen_noisy_yinyang(spec: GenSpec) -> SimulatedData:
    """Yinyang plus points drawn uniformly from a square, labelled -1 with response 1.5 + noise."""
    sizes = tuple(spec.sizes) if spec.sizes is not None else NOISY_YINYANG_SIZES
    _check_sizes(sizes, 6)
    noise_sd, noise_dim_sd = _noise_levels(spec)
    data_seed, dims_seed = child_seeds(spec.seed, 2)
    rng = np.random.default_rng(data_seed)
    covariates, labels, theta = _yinyang_covariates(sizes, spec.geometry, rng)
    half = spec.geometry.noise_half_width
    scatter = rng.uniform(-half, half, (sizes[5], 2))
    covariates = np.vstack([covariates, scatter])
    labels = np.concatenate([labels, np.full(sizes[5], NOISE_LABEL, dtype=int)])
    theta = np.concatenate([theta, np.zeros(sizes[5])])
    signal = yinyang_signal(labels, theta)
    return _finish(spec, covariates, labels, theta, signal, noise_sd, rng, noise_dim_sd, dims_seed)


def swissroll_coordinates(u1: np.ndarray, u2: np.ndarray, width: float = 4.0 * math.pi) -> np.ndarray:
    """Roll coordinates; the angle pi * 3**u1 thins out sampling on the outer turns."""
    theta = math.pi * np.power(3.0, u1)
    return np.column_stack([theta * np.cos(theta), width * u2, theta * np.sin(theta)])


def swissroll_signal(theta: np.ndarray, x2: np.ndarray) -> np.ndarray:
    gate = (x2 < math.pi) | ((2.0 * math.pi < x2) & (x2 < 3.0 * math.pi))
    return 0.1 * (theta - 2.0 * math.pi) ** 3 * gate


def gen_swissroll(spec: GenSpec) -> SimulatedData:
    sizes = tuple(spec.sizes) if spec.sizes is not None else SWISSROLL_SIZES
    _check_sizes(sizes, 1)
    if spec.ambient_dim is not None and spec.ambient_dim < 3:
        raise ConfigError(f"swissroll needs ambient_dim >= 3, got {spec.ambient_dim}")
    noise_sd, noise_dim_sd = _noise_levels(spec)
    data_seed, dims_seed = child_seeds(spec.seed, 2)
    rng = np.random.default_rng(data_seed)
    n = sizes[0]
    u1 = rng.uniform(0.0, 1.0, n)
    u2 = rng.uniform(0.0, 1.0, n)
    covariates = swissroll_coordinates(u1, u2, spec.width)
    theta = math.pi * np.power(3.0, u1)
    intrinsic = np.column_stack([theta, covariates[:, 1]])
    signal = swissroll_signal(theta, covariates[:, 1])
    labels = np.zeros(n, dtype=int)
    return _finish(spec, covariates, labels, intrinsic, signal, noise_sd, rng, noise_dim_sd, dims_seed)


def add_noise_dims(
    cloud: PointCloud, target_d: int, sd: float, seed: Union[int, np.random.SeedSequence]
) -> PointCloud:
    """Appends target_d - d columns of independent N(0, sd^2) draws."""
    if target_d < cloud.dim:
        raise ConfigError(f"target dimension {target_d} is below the current dimension {cloud.dim}")
    if target_d == cloud.dim:
        return cloud
    rng = np.random.default_rng(seed)
    extra = rng.normal(0.0, sd, (cloud.n, target_d - cloud.dim))
    return PointCloud(np.hstack([cloud.points, extra]), cloud.responses)


def _check_sizes(sizes: Sequence[int], expected: int) -> None:
    if len(sizes) != expected:
        raise ConfigError(f"expected {expected} component sizes, got {len(sizes)}")
    if any(int(s) < 1 for s in sizes):
        raise ConfigError(f"component sizes must be positive, got {list(sizes)}")


GENERATORS: Dict[str, Callable[[GenSpec], SimulatedData]] = {
    "yinyang": gen_yinyang,
    "noisy_yinyang": gen_noisy_yinyang,
    "swissroll": gen_swissroll,
}


def default_sizes(dataset: str) -> Tuple[int, ...]:
    sizes = {"yinyang": YINYANG_SIZES, "noisy_yinyang": NOISY_YINYANG_SIZES, "swissroll": SWISSROLL_SIZES}
    if dataset not in sizes:
        raise ConfigError(f"Unknown dataset '{dataset}', expected one of {sorted(sizes)}")
    return sizes[dataset]


def generate(spec: GenSpec) -> SimulatedData:
    if spec.dataset not in GENERATORS:
        raise ConfigError(f"Unknown dataset '{spec.dataset}', expected one of {sorted(GENERATORS)}")
    if spec.ambient_dim is not None and spec.ambient_dim < _INTRINSIC_DIM[spec.dataset]:
        raise ConfigError(
            f"{spec.dataset} needs ambient_dim >= {_INTRINSIC_DIM[spec.dataset]}, got {spec.ambient_dim}"
        )
    return GENERATORS[spec.dataset](spec)
