"""Set partitions, perfect matchings and the hafnian.

Indices are 0-based throughout. A set partition is a tuple of blocks, each a
sorted tuple of indices; a perfect matching is a tuple of ``(i, j)`` pairs
with ``i < j``.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import GuardError

SetPartition = tuple[tuple[int, ...], ...]
PerfectMatching = tuple[tuple[int, int], ...]

MAX_PARTITION_SIZE = 12
MAX_MATCHING_SIZE = 20


def bell(k: int) -> int:
    """Bell number via the Bell triangle."""
    if k < 0:
        raise ValueError("k must be non-negative")
    row = [1]
    for _ in range(k):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def double_factorial(n: int) -> int:
    """``n!!`` with the conventions ``0!! = (-1)!! = 1``."""
    if n < -1:
        raise ValueError("n must be >= -1")
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def _restricted_growth_strings(k: int) -> Iterator[list[int]]:
    rgs = [0] * k
    maxes = [0] * k

    def rec(i: int) -> Iterator[list[int]]:
        if i == k:
            yield rgs
            return
        for b in range(maxes[i - 1] + 2):
            rgs[i] = b
            maxes[i] = max(maxes[i - 1], b)
            yield from rec(i + 1)

    if k == 0:
        yield []
        return
    yield from rec(1)


@lru_cache(maxsize=None)
def set_partitions(k: int) -> tuple[SetPartition, ...]:
    """All partitions of ``{0..k-1}`` in restricted-growth-string order."""
    if not 1 <= k <= MAX_PARTITION_SIZE:
        raise GuardError(f"set_partitions needs 1 <= k <= {MAX_PARTITION_SIZE}, got {k}")
    out = []
    for rgs in _restricted_growth_strings(k):
        blocks: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for idx, b in enumerate(rgs):
            blocks[b].append(idx)
        out.append(tuple(tuple(b) for b in blocks))
    return tuple(out)


def _matchings(items: tuple[int, ...]) -> Iterator[PerfectMatching]:
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for pos, partner in enumerate(rest):
        remaining = rest[:pos] + rest[pos + 1:]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


@lru_cache(maxsize=None)
def perfect_matchings(n2: int) -> tuple[PerfectMatching, ...]:
    """All perfect matchings of ``{0..n2-1}``; ``n2`` must be even."""
    if n2 < 0 or n2 % 2:
        raise ValueError(f"perfect matchings need an even, non-negative size, got {n2}")
    if n2 > MAX_MATCHING_SIZE:
        raise GuardError(f"perfect_matchings limited to n2 <= {MAX_MATCHING_SIZE}")
    return tuple(_matchings(tuple(range(n2))))


def hafnian(a: np.ndarray) -> float:
    """Hafnian by expansion along the first row.

    Equivalent to summing the product of ``a[i, j]`` over every perfect
    matching of the index set. Odd dimensions have no perfect matching and
    give 0; the empty matrix gives 1.
    """
    a = np.asarray(a)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError("hafnian needs a square matrix")
    if n > MAX_MATCHING_SIZE:
        raise GuardError(f"hafnian limited to dimension <= {MAX_MATCHING_SIZE}")
    if n % 2:
        return 0.0
    rows = a.tolist()

    def rec(idx: tuple[int, ...]) -> float:
        if not idx:
            return 1.0
        i, rest = idx[0], idx[1:]
        row = rows[i]
        total = 0.0
        for pos, j in enumerate(rest):
            w = row[j]
            if w:
                total += w * rec(rest[:pos] + rest[pos + 1:])
        return total

    return rec(tuple(range(n)))
