import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ShapeError


def _frozen_array(values: Any, dtype: Any = float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    responses: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        points = _frozen_array(self.points)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ShapeError(f"points must be an n x d matrix, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ShapeError("points contain non-finite values")
        object.__setattr__(self, "points", points)
        if self.responses is not None:
            responses = _frozen_array(self.responses)
            if responses.shape != (points.shape[0],):
                raise ShapeError(
                    f"responses must have length {points.shape[0]}, got shape {responses.shape}"
                )
            if not np.all(np.isfinite(responses)):
                raise ShapeError("responses contain non-finite values")
            object.__setattr__(self, "responses", responses)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def subset(self, index: Sequence[int]) -> "PointCloud":
        index = np.asarray(index, dtype=int)
        responses = None if self.responses is None else self.responses[index]
        return PointCloud(self.points[index], responses)


@dataclass(frozen=True)
class EdgeRecord:
    i: int
    j: int
    length: float
    vd_weight: float
    count: int


@dataclass(frozen=True, eq=False)
class Skeleton:
    knots: np.ndarray
    edges: Tuple[EdgeRecord, ...]
    component: np.ndarray
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        knots = _frozen_array(self.knots)
        if knots.ndim != 2:
            raise ShapeError(f"knots must be a k x d matrix, got shape {knots.shape}")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "component", _frozen_array(self.component, dtype=int))
        lookup = np.full((knots.shape[0], knots.shape[0]), -1, dtype=int)
        for index, edge in enumerate(self.edges):
            if 0 <= edge.i < knots.shape[0] and 0 <= edge.j < knots.shape[0]:
                if lookup[edge.i, edge.j] < 0:
                    lookup[edge.i, edge.j] = index
                    lookup[edge.j, edge.i] = index
        lookup.setflags(write=False)
        object.__setattr__(self, "_lookup", lookup)

    @property
    def k(self) -> int:
        return int(self.knots.shape[0])

    @property
    def dim(self) -> int:
        return int(self.knots.shape[1])

    @property
    def edge_lookup(self) -> np.ndarray:
        """k x k matrix of edge indices, -1 where two knots are not joined."""
        return self._lookup  # type: ignore[attr-defined]

    def edge_between(self, a: int, b: int) -> Optional[int]:
        index = int(self.edge_lookup[a, b])
        return None if index < 0 else index

    @property
    def edge_endpoints(self) -> np.ndarray:
        return np.array([(e.i, e.j) for e in self.edges], dtype=int).reshape(-1, 2)

    @property
    def edge_lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges], dtype=float)


@dataclass(frozen=True)
class KnotPosition:
    index: int


@dataclass(frozen=True)
class EdgePosition:
    """A point strictly inside an edge; t is measured from the lower-indexed endpoint."""

    edge: int
    t: float

    def __post_init__(self) -> None:
        if not 0.0 < self.t < 1.0:
            raise ValueError(f"edge parameter must lie strictly inside (0, 1), got {self.t}")


SkeletonPosition = Union[KnotPosition, EdgePosition]


@dataclass(frozen=True, eq=False)
class RegressionDataset:
    positions: List[SkeletonPosition]
    responses: np.ndarray
    skeleton: Skeleton

    def __post_init__(self) -> None:
        responses = _frozen_array(self.responses)
        if responses.shape != (len(self.positions),):
            raise ShapeError(
                f"{len(self.positions)} positions but responses have shape {responses.shape}"
            )
        if not np.all(np.isfinite(responses)):
            raise ShapeError("responses contain non-finite values")
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "positions", list(self.positions))

    @property
    def n(self) -> int:
        return len(self.positions)


@dataclass
class BuildConfig:
    n_knots: Optional[int] = None
    restarts: int = 100
    max_iter: int = 100
    tol: float = 1e-8
    min_cell: int = 0
    n_components: int = 1
    linkage: str = "single"
    min_edge_count: int = 1
    seed: int = 0

    def resolved_knots(self, n: int) -> int:
        if self.n_knots is None:
            return max(1, int(round(math.sqrt(n))))
        return self.n_knots


@dataclass(frozen=True, eq=False)
class TwoNNAssignment:
    first: np.ndarray
    second: np.ndarray


@dataclass(frozen=True, eq=False)
class KnotPathTable:
    dist: np.ndarray


@dataclass(frozen=True)
class KernelSpec:
    family: str = "gaussian"
    bandwidth: float = 1.0
    relative: bool = False

    def __post_init__(self) -> None:
        if self.family not in ("gaussian", "epanechnikov"):
            raise ValueError(f"Unknown kernel family: {self.family}")
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")

    def resolve(self, rhns: Optional[float]) -> float:
        """Absolute bandwidth; relative bandwidths are multiples of r_hns."""
        if not self.relative:
            return self.bandwidth
        if rhns is None:
            raise ValueError("relative bandwidth needs r_hns")
        return self.bandwidth * rhns


@dataclass(frozen=True)
class KnnSpec:
    k: int
    ties: str = "include_all"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")


@dataclass
class SplineDesign:
    Z: np.ndarray
    beta: Optional[np.ndarray] = None

    @property
    def fitted(self) -> bool:
        return self.beta is not None


@dataclass(frozen=True, eq=False)
class GraphOperators:
    B: np.ndarray
    B_oriented: np.ndarray
    L: np.ndarray
    order: int
    delta: np.ndarray


@dataclass
class YinyangGeometry:
    """Geometric constants of the Yinyang benchmark, kept together for recalibration."""

    ring_radius: float = 3.0
    ring_jitter_sd: float = 0.1
    moon_radius_from: float = 0.8
    moon_radius_to: float = 1.2
    left_moon_center: Tuple[float, float] = (-0.5, 0.3)
    right_moon_center: Tuple[float, float] = (0.5, -0.3)
    upper_left_center: Tuple[float, float] = (-1.6, 1.6)
    bottom_right_center: Tuple[float, float] = (1.6, -1.6)
    cluster_sd: float = 0.2
    noise_half_width: float = 3.5


@dataclass
class GenSpec:
    dataset: str = "yinyang"
    sizes: Optional[Tuple[int, ...]] = None
    ambient_dim: Optional[int] = None
    noise_sd: Optional[float] = None
    noise_dim_sd: Optional[float] = None
    # rescale the noise columns to mimic this many ambient dimensions
    noise_reference_dim: Optional[int] = None
    seed: int = 0
    variance_notation: bool = True
    width: float = 4.0 * math.pi
    geometry: YinyangGeometry = field(default_factory=YinyangGeometry)


@dataclass(frozen=True, eq=False)
class SimulatedData:
    cloud: PointCloud
    labels: np.ndarray
    intrinsic: np.ndarray
    noise: np.ndarray
    signal: np.ndarray


@dataclass(frozen=True)
class MethodSpec:
    method: str
    params: Tuple[Tuple[str, Any], ...] = ()

    @property
    def param_dict(self) -> Dict[str, Any]:
        return dict(self.params)

    @property
    def label(self) -> str:
        return ",".join(f"{name}={format_value(value)}" for name, value in self.params)


def format_value(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class CvPlan:
    """Cross-validation protocol: folds, the methods to compare and their parameter grids."""

    n_folds: int = 5
    seed: int = 0
    methods: List[str] = field(default_factory=lambda: ["skernel", "sknn", "slspline", "knn"])
    grid: Dict[str, Dict[str, List[Any]]] = field(default_factory=dict)
    knots: List[Optional[int]] = field(default_factory=lambda: [None])
    components: List[int] = field(default_factory=lambda: [1])
    build: BuildConfig = field(default_factory=BuildConfig)
    locality: bool = True
    fallback: bool = True


@dataclass(frozen=True)
class SseSummary:
    median: float
    p5: float
    p95: float


@dataclass
class SseRecord:
    method: str
    param_name: str
    param_value: str
    replicate: int
    sse: float


@dataclass
class BestChoice:
    params: str
    summary: SseSummary


@dataclass
class ExperimentReport:
    summaries: Dict[str, Dict[str, SseSummary]]
    best: Dict[str, BestChoice]
    records: List[SseRecord] = field(default_factory=list)


@dataclass
class ExperimentConfig:
    gen: GenSpec = field(default_factory=GenSpec)
    plan: CvPlan = field(default_factory=CvPlan)
    replicates: int = 1
    n_samples: Optional[int] = None
