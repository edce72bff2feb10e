from pathlib import Path
from typing import List

import numpy as np

CACHE_DIR = Path.home() / ".cache" / "skelreg"

# Rows of the point block handled at once when forming n x k x d differences.
_CHUNK_ELEMENTS = 1 << 22


def ensure_dir(path: Path) -> None:
    """Creates the directory if it doesn't already exist."""
    path.mkdir(parents=True, exist_ok=True)


def squared_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Exact squared Euclidean distances between rows of points and rows of centers."""
    n, d = points.shape
    k = centers.shape[0]
    out = np.empty((n, k), dtype=float)
    step = max(1, _CHUNK_ELEMENTS // max(1, k * d))
    for start in range(0, n, step):
        block = points[start : start + step, None, :] - centers[None, :, :]
        out[start : start + step] = np.einsum("ijk,ijk->ij", block, block)
    return out


def child_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent seed sequences, stable for a given (seed, count)."""
    return np.random.SeedSequence(seed).spawn(count)
