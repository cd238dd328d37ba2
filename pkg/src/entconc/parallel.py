"""Order-preserving thread-pool map with a process-wide worker cap."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_max_workers = max(1, min(8, os.cpu_count() or 1))


def set_max_workers(count: int) -> None:
    global _max_workers
    if count < 1:
        raise ValueError("need at least one worker")
    _max_workers = count


def max_workers() -> int:
    return _max_workers


def pmap(fn, items):
    """``[fn(x) for x in items]``; results keep input order regardless of scheduling."""
    items = list(items)
    if _max_workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=_max_workers) as pool:
        return list(pool.map(fn, items))
