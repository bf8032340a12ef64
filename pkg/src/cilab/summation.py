"""Reduction modes used by every integral functional.

``ordered``  (default) pairwise ``np.sum`` over a C-contiguous copy; the
             order is fixed by the array shape, so reruns are bit-identical.
``exact``    ``math.fsum``: correctly rounded, independent of layout.
``fast``     chunked threaded partial sums combined in completion order.
             Results may differ in the last bits between runs.
"""

from __future__ import annotations

import contextlib
import math
import os
from concurrent.futures import ThreadPoolExecutor, as_completed

import numpy as np

MODES = ("ordered", "exact", "fast")

_mode = "ordered"


def get_mode() -> str:
    return _mode


def set_mode(mode: str) -> None:
    global _mode
    if mode not in MODES:
        raise ValueError(f"unknown summation mode {mode!r}; expected one of {MODES}")
    _mode = mode


@contextlib.contextmanager
def summation_mode(mode: str):
    previous = get_mode()
    set_mode(mode)
    try:
        yield
    finally:
        set_mode(previous)


def total(values) -> float:
    """Sum all entries of ``values`` under the active mode."""
    arr = np.ascontiguousarray(values, dtype=float).ravel()
    if arr.size == 0:
        return 0.0
    if _mode == "exact":
        return math.fsum(arr.tolist())
    if _mode == "fast" and arr.size > 1 << 16:
        chunks = np.array_split(arr, max(2, os.cpu_count() or 2) * 4)
        acc = 0.0
        with ThreadPoolExecutor() as pool:
            futures = [pool.submit(np.sum, c) for c in chunks]
            for fut in as_completed(futures):
                acc += float(fut.result())
        return acc
    return float(np.sum(arr))
