"""Worker-pool plumbing shared by the sweep drivers.

Cell functions must be module-level (picklable) and cells independent;
results always come back in submission order, so output ordering does not
depend on the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_WORKERS = "CZSIM_WORKERS"


def resolve_workers(workers=None) -> int:
    """Explicit argument, else the CZSIM_WORKERS env var, else CPU count."""
    if workers is None:
        env = os.environ.get(ENV_WORKERS)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def ordered_map(fn, items, workers=None):
    """Map fn over items, in order; sequential when one worker."""
    items = list(items)
    workers = resolve_workers(workers)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
