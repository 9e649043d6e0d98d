"""Small shared helpers: deterministic parallel mapping and thread resolution."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(requested: int | None) -> int:
    """Thread count from the request, the NW_THREADS env var, or the host."""
    env = os.environ.get("NW_THREADS")
    if env is not None:
        return max(1, int(env))
    if requested is not None:
        return max(1, requested)
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Sequence[T],
                 threads: int = 1) -> list[R]:
    """Map preserving input order; uses a thread pool when threads > 1."""
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
