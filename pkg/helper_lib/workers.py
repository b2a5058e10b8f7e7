"""Ordered worker pool used for per-item work (cells, windows, images)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``func`` to every item and return results in input order.

    The result never depends on ``threads``; it only changes wall time.
    """
    items = list(items)
    if threads < 1:
        raise ValueError(f"[workers] threads must be >= 1, got {threads}")
    if threads == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
