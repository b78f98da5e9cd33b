"""Small shared helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["max_threads", "parallel_map"]


def max_threads() -> int:
    """Parallelism cap from LABEL_AUDIT_THREADS (default 1 = serial)."""
    try:
        return max(1, int(os.environ.get("LABEL_AUDIT_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    """Map preserving input order; threads only if the env cap allows.

    Work items must use disjoint RNG substreams so serial and parallel runs
    agree numerically.
    """
    items = list(items)
    workers = min(max_threads(), max(1, len(items)))
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
