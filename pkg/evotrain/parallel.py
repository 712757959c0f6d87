"""

Copyright (c) 2026 evotrain developers

SPDX-License-Identifier: MIT

"""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "EVOTRAIN_THREADS"


def worker_count(threads=None):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            threads = int(env)
        else:
            threads = os.cpu_count() or 1
    return max(1, int(threads))


def ordered_map(fn, items, threads=None):
    """Apply fn to every item, returning results in input order.

    Runs serially when the resolved worker count is 1, so results never
    depend on scheduling.
    """
    items = list(items)
    threads = worker_count(threads)
    if threads == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
