# worker_pool.py
# Ordered parallel map shared by exploration, automorphism search and audits.
# Results always come back in input order, so callers merge deterministically
# whatever the worker count.

from __future__ import annotations

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    jobs: int = 1,
    progress: bool = False,
    desc: Optional[str] = None,
) -> List[R]:
    """Apply func to every item; jobs <= 1 runs inline (reference mode)."""
    items = list(items)
    bar = tqdm(total=len(items), desc=desc, disable=not progress, file=sys.stderr, leave=False)
    try:
        if jobs <= 1 or len(items) <= 1:
            results = []
            for item in items:
                results.append(func(item))
                bar.update(1)
            return results

        logger.debug("[POOL] %d items on %d workers (%s)", len(items), jobs, desc or "-")
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = []
            # Executor.map yields in submission order.
            for result in pool.map(func, items):
                results.append(result)
                bar.update(1)
            return results
    finally:
        bar.close()
