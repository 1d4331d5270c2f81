"""Ordered thread-pool map used for grid evaluations."""

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import InvalidArgument

THREADS_ENV = "RIESZ_LAB_THREADS"


def resolve_threads(threads=None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise InvalidArgument(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    threads = int(threads)
    if threads < 1:
        raise InvalidArgument(f"thread count must be >= 1, got {threads}")
    return threads


def ordered_map(fn, items, threads=None):
    """``list(map(fn, items))``, possibly concurrent; output order is input order."""
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
