"""
Worker pool used inside compute passes.

numpy releases the GIL inside FFTs and elementwise kernels, so a thread pool
is enough; results always come back in input order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from lfl.config import settings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(func: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """
    Apply ``func`` to every item, in parallel when more than one worker is allowed.

    The worker count comes from ``LFL_THREADS`` (default: CPU count).
    """
    items = list(items)
    workers = min(settings.worker_count, len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
