"""Ordered map over a thread pool sized by ``ARITHWAVE_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "ARITHWAVE_THREADS"


def default_workers() -> int:
    raw = os.environ.get(ENV_THREADS)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """``[fn(x) for x in items]``, possibly concurrent, always in input order."""
    items = list(items)
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def chunk_bounds(total: int, chunk: int) -> list[tuple[int, int]]:
    """Half-open ``[start, stop)`` ranges covering ``range(total)``."""
    return [(a, min(a + chunk, total)) for a in range(0, total, chunk)]
