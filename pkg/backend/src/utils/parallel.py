"""
Module: parallel
Description: Deterministic thread-parallel map built on joblib
"""

import logging
from typing import Callable, Iterable, Iterator, List, Optional, TypeVar

from joblib import Parallel, delayed

from .settings import resolve_threads

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """
    Apply func to every item using a thread pool

    Results come back in input order regardless of the thread count, so any
    reduction over them is deterministic.

    Args:
        func: Function applied to each item
        items: Work items
        threads: Thread count (None uses MNW_THREADS)

    Returns:
        List of results in the order of items
    """
    items = list(items)
    n_jobs = min(resolve_threads(threads), max(len(items), 1))
    if n_jobs == 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks to {n_jobs} threads")
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(func)(item) for item in items)


def parallel_imap(
    func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> Iterator[R]:
    """Like parallel_map but yields results in input order as they become available"""
    items = list(items)
    n_jobs = min(resolve_threads(threads), max(len(items), 1))
    if n_jobs == 1:
        for item in items:
            yield func(item)
        return
    yield from Parallel(n_jobs=n_jobs, prefer="threads", return_as="generator")(
        delayed(func)(item) for item in items
    )
