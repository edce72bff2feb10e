import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .core import canonicalize_position, check_position
from .errors import ShapeError
from .models import (
    KnotPathTable,
    KnotPosition,
    RegressionDataset,
    Skeleton,
    SkeletonPosition,
)
from .utils import squared_distances


def project_all(points: np.ndarray, skeleton: Skeleton) -> List[SkeletonPosition]:
    """Projects every row of points onto the skeleton."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != skeleton.dim:
        raise ShapeError(
            f"expected points of dimension {skeleton.dim}, got array of shape {points.shape}"
        )
    if not np.all(np.isfinite(points)):
        raise ShapeError("points contain non-finite values")
    if skeleton.k == 1:
        return [KnotPosition(0) for _ in range(points.shape[0])]

    knots = skeleton.knots
    order = np.argsort(squared_distances(points, knots), axis=1, kind="stable")
    nearest, second = order[:, 0], order[:, 1]
    edge_ids = skeleton.edge_lookup[nearest, second]

    direction = knots[second] - knots[nearest]
    offset = points - knots[nearest]
    t = np.einsum("ij,ij->i", offset, direction) / np.einsum("ij,ij->i", direction, direction)
    t = np.clip(t, 0.0, 1.0)

    positions: List[SkeletonPosition] = []
    for row in range(points.shape[0]):
        edge = int(edge_ids[row])
        if edge < 0:
            positions.append(KnotPosition(int(nearest[row])))
            continue
        # t runs from the nearest knot; stored parameters run from the lower index
        t_low = t[row] if nearest[row] < second[row] else 1.0 - t[row]
        positions.append(canonicalize_position(edge, t_low, skeleton))
    return positions


def project(x: np.ndarray, skeleton: Skeleton) -> SkeletonPosition:
    x = np.asarray(x, dtype=float)
    if x.shape != (skeleton.dim,):
        raise ShapeError(f"expected a vector of dimension {skeleton.dim}, got shape {x.shape}")
    return project_all(x[None, :], skeleton)[0]


def knot_paths(skeleton: Skeleton) -> KnotPathTable:
    """Shortest path lengths along skeleton edges between all pairs of knots."""
    k = skeleton.k
    ends = skeleton.edge_endpoints
    graph = csr_matrix((skeleton.edge_lengths, (ends[:, 0], ends[:, 1])), shape=(k, k))
    dist = dijkstra(graph, directed=False)
    # summing a path in either direction may differ in the last bit
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    dist.setflags(write=False)
    return KnotPathTable(dist=dist)


@dataclass(frozen=True, eq=False)
class PositionArrays:
    """Positions as parallel arrays: two anchor knots with offsets along the edge."""

    a: np.ndarray
    b: np.ndarray
    off_a: np.ndarray
    off_b: np.ndarray
    edge: np.ndarray
    t: np.ndarray
    component: np.ndarray

    def __len__(self) -> int:
        return int(self.a.shape[0])


def position_arrays(positions: Sequence[SkeletonPosition], skeleton: Skeleton) -> PositionArrays:
    m = len(positions)
    a = np.empty(m, dtype=int)
    b = np.empty(m, dtype=int)
    off_a = np.zeros(m)
    off_b = np.zeros(m)
    edge = np.full(m, -1, dtype=int)
    t = np.zeros(m)
    for row, position in enumerate(positions):
        check_position(position, skeleton)
        if isinstance(position, KnotPosition):
            a[row] = b[row] = position.index
        else:
            record = skeleton.edges[position.edge]
            a[row], b[row] = record.i, record.j
            off_a[row] = position.t * record.length
            off_b[row] = (1.0 - position.t) * record.length
            edge[row] = position.edge
            t[row] = position.t
    return PositionArrays(a, b, off_a, off_b, edge, t, skeleton.component[a])


def _distance_block(
    rows: PositionArrays,
    cols: PositionArrays,
    table: KnotPathTable,
    lengths: np.ndarray,
    locality: bool = False,
) -> np.ndarray:
    best = np.full((len(rows), len(cols)), np.inf)
    for row_knot, row_off in ((rows.a, rows.off_a), (rows.b, rows.off_b)):
        for col_knot, col_off in ((cols.a, cols.off_a), (cols.b, cols.off_b)):
            # (offset + offset) first keeps the sum symmetric in its arguments
            candidate = table.dist[row_knot[:, None], col_knot[None, :]] + (
                row_off[:, None] + col_off[None, :]
            )
            np.minimum(best, candidate, out=best)

    same_edge = (rows.edge[:, None] == cols.edge[None, :]) & (rows.edge[:, None] >= 0)
    if np.any(same_edge):
        edge_length = lengths[np.maximum(rows.edge, 0)]
        along = np.abs(rows.t[:, None] - cols.t[None, :]) * edge_length[:, None]
        best = np.where(same_edge, np.minimum(best, along), best)

    best[rows.component[:, None] != cols.component[None, :]] = np.inf
    if locality:
        shared = (
            (rows.a[:, None] == cols.a[None, :])
            | (rows.a[:, None] == cols.b[None, :])
            | (rows.b[:, None] == cols.a[None, :])
            | (rows.b[:, None] == cols.b[None, :])
        )
        best[~shared] = np.inf
    return best


def skeleton_distance(
    p: SkeletonPosition, q: SkeletonPosition, skeleton: Skeleton, table: KnotPathTable
) -> float:
    block = _distance_block(
        position_arrays([p], skeleton),
        position_arrays([q], skeleton),
        table,
        skeleton.edge_lengths,
    )
    return float(block[0, 0])


def pairwise_distances(
    dataset: RegressionDataset,
    query: Sequence[SkeletonPosition],
    locality: bool = False,
    table: Optional[KnotPathTable] = None,
) -> np.ndarray:
    """Skeleton distances from each query position (rows) to each training position (columns)."""
    skeleton = dataset.skeleton
    if table is None:
        table = knot_paths(skeleton)
    return _distance_block(
        position_arrays(query, skeleton),
        position_arrays(dataset.positions, skeleton),
        table,
        skeleton.edge_lengths,
        locality,
    )


class DistanceEngine:
    """Skeleton distances with the knot path table computed once per skeleton."""

    def __init__(self, skeleton: Skeleton):
        self.skeleton = skeleton
        self.table = knot_paths(skeleton)
        self.lengths = skeleton.edge_lengths
        logging.debug(f"Computed knot path table for {skeleton.k} knots")

    def arrays(self, positions: Sequence[SkeletonPosition]) -> PositionArrays:
        return position_arrays(positions, self.skeleton)

    def distance(self, p: SkeletonPosition, q: SkeletonPosition) -> float:
        return skeleton_distance(p, q, self.skeleton, self.table)

    def pairwise(
        self,
        query: Sequence[SkeletonPosition],
        train: Sequence[SkeletonPosition],
        locality: bool = False,
    ) -> np.ndarray:
        return _distance_block(
            self.arrays(query), self.arrays(train), self.table, self.lengths, locality
        )
