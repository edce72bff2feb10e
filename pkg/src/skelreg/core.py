import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .models import EdgePosition, KnotPosition, Skeleton, SkeletonPosition

LENGTH_RTOL = 1e-12


@dataclass(frozen=True)
class Violation:
    kind: str
    index: Tuple[int, ...]
    detail: str = ""


def canonicalize_position(edge: int, t: float, skeleton: Skeleton) -> SkeletonPosition:
    """Turns a raw (edge, t) pair into a position, snapping t = 0 or 1 to the endpoint knot."""
    if not 0 <= edge < len(skeleton.edges):
        raise IndexError(f"edge index {edge} out of range for {len(skeleton.edges)} edges")
    record = skeleton.edges[edge]
    t = float(t)
    if t <= 0.0:
        return KnotPosition(record.i)
    if t >= 1.0:
        return KnotPosition(record.j)
    return EdgePosition(edge, t)


def check_position(position: SkeletonPosition, skeleton: Skeleton) -> None:
    if isinstance(position, KnotPosition):
        if not 0 <= position.index < skeleton.k:
            raise IndexError(f"knot index {position.index} out of range for {skeleton.k} knots")
    elif isinstance(position, EdgePosition):
        if not 0 <= position.edge < len(skeleton.edges):
            raise IndexError(
                f"edge index {position.edge} out of range for {len(skeleton.edges)} edges"
            )
    else:
        raise TypeError(f"not a skeleton position: {position!r}")


def position_knots(position: SkeletonPosition, skeleton: Skeleton) -> Tuple[int, ...]:
    """The knots a position is attached to: the knot itself, or both edge endpoints."""
    if isinstance(position, KnotPosition):
        return (position.index,)
    record = skeleton.edges[position.edge]
    return (record.i, record.j)


def position_component(position: SkeletonPosition, skeleton: Skeleton) -> int:
    return int(skeleton.component[position_knots(position, skeleton)[0]])


def ambient_location(position: SkeletonPosition, skeleton: Skeleton) -> np.ndarray:
    check_position(position, skeleton)
    if isinstance(position, KnotPosition):
        return np.array(skeleton.knots[position.index], dtype=float)
    record = skeleton.edges[position.edge]
    t = position.t
    return (1.0 - t) * skeleton.knots[record.i] + t * skeleton.knots[record.j]


def validate_skeleton(skeleton: Skeleton) -> List[Violation]:
    """Lists every broken skeleton invariant; an empty list means the skeleton is well formed."""
    violations: List[Violation] = []
    k = skeleton.k
    if k < 1:
        violations.append(Violation("EmptySkeleton", (), "a skeleton needs at least one knot"))
    if not np.all(np.isfinite(skeleton.knots)):
        violations.append(Violation("NonFiniteKnot", (), "knot coordinates must be finite"))
    if skeleton.component.shape != (k,):
        violations.append(
            Violation(
                "ComponentShape",
                (),
                f"expected {k} component labels, got shape {skeleton.component.shape}",
            )
        )
        component: Optional[np.ndarray] = None
    else:
        component = skeleton.component

    seen = set()
    for index, edge in enumerate(skeleton.edges):
        if not (0 <= edge.i < k and 0 <= edge.j < k):
            violations.append(Violation("InvalidEndpoint", (index,), f"edge ({edge.i}, {edge.j})"))
            continue
        if edge.i == edge.j:
            violations.append(Violation("SelfLoop", (edge.i, edge.j)))
            continue
        if edge.i > edge.j:
            violations.append(Violation("UnorderedEndpoints", (edge.i, edge.j)))
        pair = (min(edge.i, edge.j), max(edge.i, edge.j))
        if pair in seen:
            violations.append(Violation("DuplicateEdge", pair))
        seen.add(pair)
        if component is not None and component[edge.i] != component[edge.j]:
            violations.append(Violation("ComponentMismatch", pair))
        if not edge.length > 0:
            violations.append(Violation("NonPositiveLength", pair, f"length {edge.length}"))
        distance = float(np.linalg.norm(skeleton.knots[edge.i] - skeleton.knots[edge.j]))
        if not math.isclose(edge.length, distance, rel_tol=LENGTH_RTOL, abs_tol=0.0):
            violations.append(
                Violation("LengthMismatch", pair, f"stored {edge.length}, knots {distance}")
            )
        if edge.vd_weight < 0:
            violations.append(Violation("NegativeWeight", pair))
        if edge.count < 0:
            violations.append(Violation("NegativeCount", pair))
    return violations


def encode_position(position: SkeletonPosition) -> Tuple[str, int, float]:
    """Flat (kind, knot_or_edge_index, t) form used in CSV and JSON files."""
    if isinstance(position, KnotPosition):
        return ("knot", position.index, 0.0)
    return ("edge", position.edge, position.t)


def decode_position(kind: str, index: int, t: float) -> SkeletonPosition:
    if kind == "knot":
        return KnotPosition(int(index))
    if kind == "edge":
        return EdgePosition(int(index), float(t))
    raise ValueError(f"Unknown position kind: {kind}")
