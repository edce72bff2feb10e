import logging
from dataclasses import asdict
from typing import Dict, List, NamedTuple, Tuple

import numpy as np
from scipy import sparse
from scipy.cluster.hierarchy import cut_tree, linkage as hierarchical_linkage
from scipy.spatial.distance import squareform

from .core import validate_skeleton
from .errors import ConfigError, DegenerateError
from .models import BuildConfig, EdgeRecord, PointCloud, Skeleton, TwoNNAssignment
from .utils import child_seeds, squared_distances

LINKAGES = ("single", "average")


class KnotFit(NamedTuple):
    knots: np.ndarray
    assignment: np.ndarray
    objective: float


class LloydRun(NamedTuple):
    centers: np.ndarray
    labels: np.ndarray
    objective: float
    history: List[float]


def kmeans_plusplus(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding of k centers from the rows of points."""
    n = points.shape[0]
    chosen = [int(rng.integers(0, n))]
    closest = squared_distances(points, points[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            index = int(rng.choice(n, p=closest / total))
        else:
            # All remaining points coincide with a chosen center.
            index = int(rng.integers(0, n))
        chosen.append(index)
        closest = np.minimum(closest, squared_distances(points, points[[index]]).ravel())
    return np.array(points[chosen], dtype=float)


def _assign(points: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    d2 = squared_distances(points, centers)
    # argmin returns the first minimum, i.e. the lowest center index on ties
    labels = np.argmin(d2, axis=1)
    own = d2[np.arange(points.shape[0]), labels]
    return labels, own, float(own.sum())


def run_lloyd(
    points: np.ndarray, centers: np.ndarray, max_iter: int, tol: float
) -> LloydRun:
    """Lloyd iterations from the given centers until the relative objective change drops below tol."""
    centers = np.array(centers, dtype=float)
    k = centers.shape[0]
    labels, own, objective = _assign(points, centers)
    history = [objective]
    n = points.shape[0]
    for _ in range(max_iter):
        counts = np.bincount(labels, minlength=k)
        indicator = sparse.csr_matrix((np.ones(n), (labels, np.arange(n))), shape=(k, n))
        sums = np.asarray(indicator @ points)
        filled = counts > 0
        centers[filled] = sums[filled] / counts[filled, None]
        empty = np.flatnonzero(~filled)
        if empty.size:
            spare = own.copy()
            for j in empty:
                farthest = int(np.argmax(spare))
                logging.debug(f"Reseeding empty cluster {j} at point {farthest}")
                centers[j] = points[farthest]
                spare[farthest] = -1.0
        labels, own, new_objective = _assign(points, centers)
        history.append(new_objective)
        change = objective - new_objective
        objective = new_objective
        if change <= tol * max(objective + change, 0.0):
            break
    return LloydRun(centers, labels, objective, history)


def build_knots(cloud: PointCloud, cfg: BuildConfig) -> KnotFit:
    n = cloud.n
    k = cfg.resolved_knots(n)
    if k < 1 or k > n:
        raise ConfigError(f"n_knots must be between 1 and n={n}, got {k}")
    if cfg.restarts < 1 or cfg.max_iter < 1:
        raise ConfigError("restarts and max_iter must be positive")

    points = np.asarray(cloud.points, dtype=float)
    best = None
    for restart, seed in enumerate(child_seeds(cfg.seed, cfg.restarts)):
        rng = np.random.default_rng(seed)
        run = run_lloyd(points, kmeans_plusplus(points, k, rng), cfg.max_iter, cfg.tol)
        logging.debug(
            f"k-means restart {restart}: objective {run.objective:.6g} after {len(run.history) - 1} iterations"
        )
        if best is None or run.objective < best.objective:
            best = run
    assert best is not None
    return KnotFit(best.centers, best.labels, best.objective)


def prune_knots(
    knots: np.ndarray, assignment: np.ndarray, min_cell: int, points: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Drops knots whose cells hold fewer than min_cell points and reassigns their points."""
    if min_cell < 0:
        raise ConfigError(f"min_cell must be nonnegative, got {min_cell}")
    knots = np.asarray(knots, dtype=float)
    assignment = np.asarray(assignment, dtype=int)
    if min_cell == 0:
        return knots, assignment

    counts = np.bincount(assignment, minlength=knots.shape[0])
    keep = np.flatnonzero(counts >= min_cell)
    if keep.size == 0:
        raise DegenerateError(f"pruning with min_cell={min_cell} removes every knot")
    if keep.size == knots.shape[0]:
        return knots, assignment

    logging.info(f"Pruning {knots.shape[0] - keep.size} knots with fewer than {min_cell} points")
    survivors = knots[keep]
    remap = np.full(knots.shape[0], -1, dtype=int)
    remap[keep] = np.arange(keep.size)
    reassignment = remap[assignment]
    orphans = np.flatnonzero(reassignment < 0)
    if orphans.size:
        d2 = squared_distances(np.asarray(points, dtype=float)[orphans], survivors)
        reassignment[orphans] = np.argmin(d2, axis=1)
    return survivors, reassignment


def assign_two_nn(cloud: PointCloud, knots: np.ndarray) -> TwoNNAssignment:
    knots = np.asarray(knots, dtype=float)
    if knots.shape[0] < 2:
        raise ConfigError("the 2-NN assignment needs at least two knots")
    d2 = squared_distances(np.asarray(cloud.points, dtype=float), knots)
    # a stable sort keeps the lower knot index first on distance ties
    order = np.argsort(d2, axis=1, kind="stable")[:, :2]
    return TwoNNAssignment(first=order[:, 0].copy(), second=order[:, 1].copy())


def build_edges(
    two_nn: TwoNNAssignment, knots: np.ndarray, n: int, min_edge_count: int = 1
) -> List[EdgeRecord]:
    """One edge per knot pair whose sample 2-NN region holds at least min_edge_count points."""
    knots = np.asarray(knots, dtype=float)
    low = np.minimum(two_nn.first, two_nn.second)
    high = np.maximum(two_nn.first, two_nn.second)
    pairs, counts = np.unique(np.stack([low, high], axis=1), axis=0, return_counts=True)

    edges = []
    for (i, j), count in zip(pairs.reshape(-1, 2), counts):
        if count < max(1, min_edge_count):
            continue
        length = float(np.linalg.norm(knots[i] - knots[j]))
        if length == 0.0:
            raise DegenerateError(f"knots {i} and {j} coincide but share a 2-NN region")
        edges.append(
            EdgeRecord(
                i=int(i),
                j=int(j),
                length=length,
                vd_weight=(int(count) / n) / length,
                count=int(count),
            )
        )
    return edges


def _first_appearance(labels: np.ndarray) -> np.ndarray:
    mapping: Dict[int, int] = {}
    out = np.empty(labels.shape[0], dtype=int)
    for index, label in enumerate(labels):
        out[index] = mapping.setdefault(int(label), len(mapping))
    return out


def segment_skeleton(
    edges: List[EdgeRecord], k: int, n_components: int, linkage: str = "single"
) -> Tuple[np.ndarray, List[EdgeRecord]]:
    """Cuts the knots into n_components clusters by hierarchical clustering on Voronoi density."""
    if not 1 <= n_components <= k:
        raise ConfigError(f"n_components must be between 1 and k={k}, got {n_components}")
    if linkage not in LINKAGES:
        raise ConfigError(f"Unknown linkage '{linkage}', expected one of {LINKAGES}")
    if n_components == 1:
        return np.zeros(k, dtype=int), list(edges)
    if n_components == k:
        return np.arange(k, dtype=int), []

    s_max = max((e.vd_weight for e in edges), default=0.0)
    # Non-edges get a dissimilarity no average over at most k^2 pairs can bring below s_max.
    non_edge = 10.0 * k * k * (s_max + 1.0)
    dissimilarity = np.full((k, k), non_edge)
    for edge in edges:
        dissimilarity[edge.i, edge.j] = dissimilarity[edge.j, edge.i] = s_max - edge.vd_weight
    np.fill_diagonal(dissimilarity, 0.0)

    tree = hierarchical_linkage(squareform(dissimilarity, checks=False), method=linkage)
    labels = _first_appearance(cut_tree(tree, n_clusters=n_components).ravel())
    kept = [e for e in edges if labels[e.i] == labels[e.j]]
    logging.debug(f"Segmentation into {n_components} components removed {len(edges) - len(kept)} edges")
    return labels, kept


def build_skeleton(cloud: PointCloud, cfg: BuildConfig) -> Skeleton:
    knots, assignment, objective = build_knots(cloud, cfg)
    knots, assignment = prune_knots(knots, assignment, cfg.min_cell, cloud.points)
    k = knots.shape[0]
    if cfg.n_components > k:
        raise ConfigError(f"cannot cut {k} knots into {cfg.n_components} components")

    if k >= 2:
        edges = build_edges(assign_two_nn(cloud, knots), knots, cloud.n, cfg.min_edge_count)
    else:
        edges = []
    component, edges = segment_skeleton(edges, k, cfg.n_components, cfg.linkage)

    meta = {
        "config": asdict(cfg),
        "n": cloud.n,
        "k": k,
        "objective": objective,
        "cell_counts": np.bincount(assignment, minlength=k).tolist(),
    }
    skeleton = Skeleton(knots=knots, edges=tuple(edges), component=component, meta=meta)
    violations = validate_skeleton(skeleton)
    if violations:
        raise DegenerateError(f"constructed skeleton is invalid: {violations}")
    logging.info(
        f"Built skeleton with {k} knots, {len(edges)} edges and {cfg.n_components} components from {cloud.n} points"
    )
    return skeleton
