"""Reproducible summation and small parallel helpers.

Every long sum in the package goes through :func:`tree_sum`: the input is cut
into fixed chunks of 2**14 entries, each chunk is summed by numpy, and the
chunk totals are combined along a fixed binary tree.  The chunk boundaries and
the tree shape depend only on the length of the input, so the result is
bit-identical whether the chunks are evaluated serially or by a thread pool.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

CHUNK = 1 << 14


def resolve_workers(workers) -> int:
    if workers is None:
        return 1
    if workers == "auto":
        return os.cpu_count() or 1
    w = int(workers)
    if w < 1:
        raise ValueError("worker count must be positive")
    return w


def pmap(fn: Callable, items: Sequence, workers=1) -> list:
    """Ordered map, optionally over a thread pool."""
    workers = resolve_workers(workers)
    if workers == 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _combine(parts: list):
    # fixed pairwise tree over the chunk totals
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def tree_sum(values: np.ndarray, workers=1, chunk: int = CHUNK):
    """Deterministic sum of a 1-d array (real or complex)."""
    values = np.asarray(values)
    n = values.shape[0]
    if n == 0:
        return values.dtype.type(0)
    starts = list(range(0, n, chunk))
    parts = pmap(lambda s: values[s:s + chunk].sum(), starts, workers)
    return _combine(parts)


def chunked_tree_sum(block: Callable[[int, int], np.ndarray], lo: int, hi: int,
                     workers=1, chunk: int = CHUNK):
    """Tree sum of block(a, b) over [lo, hi) without materializing the whole range.

    ``block(a, b)`` must return the summands for indices a..b-1.  Chunk
    boundaries are aligned to ``lo`` so the result equals
    ``tree_sum(block(lo, hi))`` bit for bit.
    """
    if hi <= lo:
        return 0.0
    starts = list(range(lo, hi, chunk))
    parts = pmap(lambda s: block(s, min(s + chunk, hi)).sum(), starts, workers)
    return _combine(parts)


def fmt17(x: float) -> str:
    """Float formatted with 17 significant digits."""
    return format(float(x), ".17g")
