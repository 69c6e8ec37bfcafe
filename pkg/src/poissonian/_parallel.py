"""Deterministic thread fan-out honouring ``PAIRCORR_THREADS``."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    raw = os.environ.get("PAIRCORR_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def ordered_map(fn, items):
    """``list(map(fn, items))`` on a thread pool; result order follows ``items``."""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
