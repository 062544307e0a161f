"""Worker-pool sizing shared by region sweeps and the validation suite."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError


def worker_count() -> int:
    """os.cpu_count(), capped by the CCN_LAB_THREADS environment variable."""
    n = os.cpu_count() or 1
    raw = os.environ.get("CCN_LAB_THREADS")
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigurationError(f"CCN_LAB_THREADS must be an integer, got {raw!r}") from None
        if cap < 1:
            raise ConfigurationError("CCN_LAB_THREADS must be at least 1")
        n = min(n, cap)
    return n


def pmap(fn, items, workers: int | None = None) -> list:
    """Order-preserving map; results are collected by the caller's thread."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
