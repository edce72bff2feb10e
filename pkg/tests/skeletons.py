"""Small hand-made skeletons shared by the tests."""

import numpy as np

from skelreg.models import EdgeRecord, Skeleton


def make_skeleton(knots, pairs, component=None, weights=None):
    knots = np.asarray(knots, dtype=float)
    edges = []
    for index, (i, j) in enumerate(pairs):
        i, j = min(i, j), max(i, j)
        length = float(np.linalg.norm(knots[i] - knots[j]))
        weight = 1.0 if weights is None else weights[index]
        edges.append(EdgeRecord(i=i, j=j, length=length, vd_weight=weight, count=1))
    if component is None:
        component = np.zeros(knots.shape[0], dtype=int)
    return Skeleton(knots=knots, edges=tuple(edges), component=np.asarray(component))


def chain_skeleton(gaps):
    """Knots on the x axis separated by the given gaps, joined in order."""
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    knots = np.column_stack([xs, np.zeros_like(xs)])
    return make_skeleton(knots, [(i, i + 1) for i in range(len(gaps))])


def random_tree_skeleton(k, rng, dim=2):
    knots = rng.normal(size=(k, dim))
    pairs = [(int(rng.integers(0, i)), i) for i in range(1, k)]
    return make_skeleton(knots, pairs)
