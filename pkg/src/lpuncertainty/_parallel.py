"""Order-preserving parallel map capped by the UL_THREADS environment variable."""

import os
from concurrent.futures import ThreadPoolExecutor


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("UL_THREADS", "1")))
    except ValueError:
        return 1


def ordered_map(fn, items):
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
