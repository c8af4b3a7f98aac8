"""
Worker pool for sweeps

Per-point computations share nothing mutable, so results are merged in input order
and are identical for any worker count.
"""
import logging
import os
from contextlib import contextmanager
from multiprocessing import Pool
from typing import Callable, Iterable, Iterator, List, Optional

from SquidSim.config import get_settings

logger = logging.getLogger(__name__)


def resolve_workers(threads: Optional[int] = None) -> int:
    """Worker count from the argument or SQUIDSIM_THREADS (0 = one per CPU)"""
    if threads is None:
        threads = get_settings().threads
    if threads == 0:
        threads = os.cpu_count() or 1
    return max(1, threads)


@contextmanager
def ordered_map(threads: Optional[int] = None) -> Iterator[Callable]:
    """
    Yield a map function that returns results in input order.

    The process pool is started on the first call with more than one item, so
    commands that never map any work run without one.
    """
    workers = resolve_workers(threads)
    pool = None

    def map_fn(fn: Callable, items: Iterable) -> List:
        nonlocal pool
        items = list(items)
        if workers == 1 or len(items) < 2:
            return list(map(fn, items))
        if pool is None:
            logger.info("Starting worker pool with %d processes", workers)
            pool = Pool(workers)
        return pool.map(fn, items, chunksize=1)

    try:
        yield map_fn
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
