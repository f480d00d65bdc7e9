"""Shared worker pool for grid points, search restarts and trial chunks."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
import os
import threading
from typing import Callable, Iterable, TypeVar

import numpy as np

MAX_WORKERS = min(8, os.cpu_count() or 1)

T = TypeVar("T")
R = TypeVar("R")

_executor: ThreadPoolExecutor | None = None
_executor_lock = threading.Lock()
_local = threading.local()


def get_executor() -> ThreadPoolExecutor:
    global _executor  # noqa: PLW0603 - module-level singleton
    with _executor_lock:
        if _executor is None:
            _executor = ThreadPoolExecutor(max_workers=MAX_WORKERS, thread_name_prefix="exponents")
    return _executor


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """Apply ``fn`` to every item; results come back in input order.

    Calls made from inside a pool task run serially so nested maps cannot
    starve the pool.
    """
    items = list(items)
    if workers == 1 or len(items) <= 1 or getattr(_local, "busy", False):
        return [fn(item) for item in items]
    if workers is None:
        return list(get_executor().map(_mark_busy(fn), items))
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="exponents") as pool:
        return list(pool.map(_mark_busy(fn), items))


def task_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for task ``index``; independent of scheduling."""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(sequence))


def _mark_busy(fn: Callable[[T], R]) -> Callable[[T], R]:
    def _run(item: T) -> R:
        _local.busy = True
        try:
            return fn(item)
        finally:
            _local.busy = False

    return _run
