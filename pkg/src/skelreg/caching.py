import hashlib
import json
import logging
import re
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .builder import build_skeleton
from .models import BuildConfig, PointCloud, Skeleton
from .storage import skeleton_from_dict, skeleton_to_dict
from .utils import ensure_dir

CacheKey = Tuple[Any, ...]


def _sanitize_filename(s: str) -> str:
    """Replaces non-alphanumeric characters with underscores."""
    return re.sub(r"[^a-zA-Z0-9_\-.]", "_", s)


def _generate_cache_filename(key: CacheKey) -> str:
    """Generates a readable cache filename from the cache key."""
    parts = [_sanitize_filename(str(part)) for part in key]
    return "_".join(parts) + ".json"


def input_digest(cloud: PointCloud, cfg: BuildConfig) -> str:
    """SHA-256 over the training rows and the build configuration."""
    digest = hashlib.sha256()
    points = np.ascontiguousarray(cloud.points, dtype=np.float64)
    digest.update(str(points.shape).encode())
    digest.update(points.tobytes())
    digest.update(json.dumps(asdict(cfg), sort_keys=True).encode())
    return digest.hexdigest()


class SkeletonCache:
    """Skeletons per cross-validation fold, kept in memory and optionally on disk.

    An entry only counts as a hit when it was built from exactly the same
    training rows and build configuration.
    """

    def __init__(self, cache_dir: Optional[Path] = None, force_refresh: bool = False):
        self.cache_dir = cache_dir
        self.force_refresh = force_refresh
        self._memory: Dict[CacheKey, Tuple[str, Skeleton]] = {}
        self.hits = 0
        self.misses = 0
        if cache_dir:
            ensure_dir(cache_dir)

    def get_or_build(self, key: CacheKey, cloud: PointCloud, cfg: BuildConfig) -> Skeleton:
        digest = input_digest(cloud, cfg)
        skeleton = self._lookup(key, digest)
        if skeleton is not None:
            self.hits += 1
            logging.debug(f"Skeleton cache hit for {key}")
            return skeleton

        self.misses += 1
        skeleton = build_skeleton(cloud, cfg)
        self._store(key, digest, skeleton)
        return skeleton

    def _lookup(self, key: CacheKey, digest: str) -> Optional[Skeleton]:
        if self.force_refresh:
            return None
        if key in self._memory:
            stored_digest, skeleton = self._memory[key]
            if stored_digest == digest:
                return skeleton
            logging.debug(f"Skeleton cache entry {key} was built from different inputs")
            return None
        if not self.cache_dir:
            return None

        cache_file = self.cache_dir / _generate_cache_filename(key)
        if not cache_file.exists():
            return None
        try:
            with open(cache_file, "r") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logging.warning(f"Failed to read cache file {cache_file}: {e}")
            return None
        if data.get("digest") != digest:
            logging.debug(f"Cache file {cache_file} was built from different inputs")
            return None
        skeleton = skeleton_from_dict(data["skeleton"])
        self._memory[key] = (digest, skeleton)
        return skeleton

    def _store(self, key: CacheKey, digest: str, skeleton: Skeleton) -> None:
        self._memory[key] = (digest, skeleton)
        if not self.cache_dir:
            return
        cache_file = self.cache_dir / _generate_cache_filename(key)
        try:
            with open(cache_file, "w") as f:
                json.dump({"digest": digest, "skeleton": skeleton_to_dict(skeleton)}, f)
        except OSError as e:
            logging.warning(f"Failed to write cache file {cache_file}: {e}")
