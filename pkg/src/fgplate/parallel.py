"""Ordered fan-out of independent jobs over worker processes."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator


def worker_count() -> int:
    """CPU count, capped by the ``FGPLATE_THREADS`` environment variable."""
    env = os.environ.get("FGPLATE_THREADS")
    cpus = os.cpu_count() or 1
    cap = int(env) if env else cpus
    return max(1, min(cap, cpus))


def ordered_map(fn: Callable, jobs: Iterable, workers: int | None = None,
                chunksize: int = 4) -> Iterator:
    """Results in job order, whatever the completion order."""
    workers = workers or worker_count()
    if workers == 1:
        yield from map(fn, jobs)
        return
    with ProcessPoolExecutor(workers) as pool:
        yield from pool.map(fn, jobs, chunksize=chunksize)
