"""Candidate-permutation matrix: refinement, classification and enumeration.

``sigma[i, j]`` is True while mapping vertex ``i`` of the first graph to
vertex ``j`` of the second has not been ruled out.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_CEILING, Context, Decimal
from typing import Iterator, Sequence

import numpy as np

from .combinatorics import bell, double_factorial
from .correlations import CorrelationTensor
from .errors import EnumerationCapExceeded, GuardError
from .graph import Graph, Permutation

PERMANENT_MAX_SIZE = 24


def full_candidates(m: int) -> np.ndarray:
    return np.ones((m, m), dtype=bool)


def quantize(values, tau: float) -> np.ndarray:
    """Integer keys ``round(v / tau)``; equal keys mean equal values."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    return np.rint(np.asarray(values, dtype=float) / tau).astype(np.int64)


def shared_tolerance(c1: CorrelationTensor, c2: CorrelationTensor, tau_rel: float) -> float:
    """Scale-aware quantum ``tau_rel * max |C|`` over both tensors."""
    scale = max(float(np.max(np.abs(c1.values))), float(np.max(np.abs(c2.values))))
    return tau_rel * scale if scale > 0 else tau_rel


def _slice_keys(c: CorrelationTensor, tau: float) -> list[bytes]:
    return [np.sort(quantize(c.slice(i), tau)).tobytes() for i in range(c.modes)]


def refine(
    c1: CorrelationTensor,
    c2: CorrelationTensor,
    sigma_prev: np.ndarray,
    tau: float,
) -> np.ndarray:
    """Keep ``sigma[i, j]`` only where slice ``i`` of ``c1`` and slice ``j`` of
    ``c2`` hold the same multiset of quantized values."""
    if c1.order != c2.order or c1.values.shape != c2.values.shape:
        raise ValueError("correlation tensors differ in order or shape")
    sigma_prev = np.asarray(sigma_prev, dtype=bool)
    if sigma_prev.shape != (c1.modes, c1.modes):
        raise ValueError("candidate matrix shape does not match tensors")
    k1, k2 = _slice_keys(c1, tau), _slice_keys(c2, tau)
    match = np.array([[a == b for b in k2] for a in k1], dtype=bool)
    return sigma_prev & match


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def _glynn(rows: list[list[int]], n: int) -> int:
    # rows[i] lists the columns j with a[i, j] = 1
    if n == 0:
        return 1
    colsum = [0] * n
    for r in rows:
        for j in r:
            colsum[j] += 1
    total = math.prod(colsum)
    sign = 1
    flipped = [False] * n
    for g in range(1, 1 << (n - 1)):
        i = (g & -g).bit_length()  # row 0 keeps delta = +1
        step = 2 if flipped[i] else -2
        flipped[i] = not flipped[i]
        for j in rows[i]:
            colsum[j] += step
        sign = -sign
        total += sign * math.prod(colsum)
    return total >> (n - 1)


def _components(b: np.ndarray) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column support graph."""
    m = b.shape[0]
    seen_r, seen_c = [False] * m, [False] * m
    comps = []
    for start in range(m):
        if seen_r[start]:
            continue
        rows, cols, stack = [], [], [("r", start)]
        seen_r[start] = True
        while stack:
            side, v = stack.pop()
            if side == "r":
                rows.append(v)
                for j in np.nonzero(b[v])[0]:
                    if not seen_c[j]:
                        seen_c[j] = True
                        stack.append(("c", int(j)))
            else:
                cols.append(v)
                for i in np.nonzero(b[:, v])[0]:
                    if not seen_r[i]:
                        seen_r[i] = True
                        stack.append(("r", int(i)))
        comps.append((sorted(rows), sorted(cols)))
    return comps


def exact_permanent(b: np.ndarray, max_size: int = PERMANENT_MAX_SIZE) -> int:
    """Permanent of a square 0/1 matrix with Glynn's Gray-code formula.

    The support splits into independent bipartite components first; the
    permanent is the product over components, and a component with unequal
    row and column counts makes it zero. ``max_size`` bounds each component.
    """
    b = np.asarray(b, dtype=bool)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("permanent needs a square matrix")
    if np.any(~b.any(axis=1)) or np.any(~b.any(axis=0)):
        return 0
    result = 1
    for rows, cols in _components(b):
        if len(rows) != len(cols):
            return 0
        if len(rows) > max_size:
            raise GuardError(f"permanent component of size {len(rows)} exceeds {max_size}")
        sub = b[np.ix_(rows, cols)]
        result *= _glynn([list(np.nonzero(r)[0]) for r in sub], len(rows))
        if result == 0:
            return 0
    return result


def count_bound(sigma: np.ndarray) -> int:
    """Bregman upper bound ``prod_i (r_i!)^(1/r_i)`` on the permanent, rounded up."""
    sums = np.asarray(sigma, dtype=bool).sum(axis=1)
    if np.any(sums == 0):
        return 0
    if np.all(sums == 1):
        return 1
    ctx = Context(prec=80)
    log = Decimal(0)
    for r, times in Counter(int(r) for r in sums).items():
        log += ctx.divide(ctx.ln(Decimal(math.factorial(r))), Decimal(r)) * times
    # relative slack far above the working precision keeps the rounding one-sided
    value = ctx.multiply(ctx.exp(log), Decimal("1.000000000000000000000000000001"))
    return int(value.to_integral_value(rounding=ROUND_CEILING))


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class Status(str, enum.Enum):
    INVALID = "invalid"
    VALID = "valid"
    ABOVE = "indeterminate_above"
    BELOW = "indeterminate_below"


@dataclass(frozen=True)
class SigmaStatus:
    status: Status
    witness: Permutation | None = None
    count: int | None = None
    exact: bool = True


@dataclass(frozen=True)
class CostModel:
    """Estimated work of the next correlation order, in cumulant-kernel calls.

    ``M^k`` tensor entries, ``Bell(k)`` partitions each, and up to
    ``(2k-1)!!`` Wick matchings per block; ``scale`` rescales the whole
    estimate.
    """

    scale: float = 1.0

    def next_order_cost(self, k: int, m: int) -> float:
        return self.scale * m**k * bell(k) * double_factorial(2 * k - 1)


def classify(
    sigma: np.ndarray,
    k: int,
    cost: CostModel = CostModel(),
    permanent_max: int = PERMANENT_MAX_SIZE,
) -> SigmaStatus:
    sigma = np.asarray(sigma, dtype=bool)
    m = sigma.shape[0]
    rows, cols = sigma.sum(axis=1), sigma.sum(axis=0)
    if np.any(rows == 0) or np.any(cols == 0):
        return SigmaStatus(Status.INVALID, count=0)
    if np.all(rows == 1) and np.all(cols == 1):
        witness = tuple(int(j) for j in np.argmax(sigma, axis=1))
        return SigmaStatus(Status.VALID, witness=witness, count=1)
    try:
        count, exact = exact_permanent(sigma, permanent_max), True
    except GuardError:
        count, exact = count_bound(sigma), False
    if count * m * m <= cost.next_order_cost(k + 1, m):
        return SigmaStatus(Status.BELOW, count=count, exact=exact)
    return SigmaStatus(Status.ABOVE, count=count, exact=exact)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def iter_candidates(sigma: np.ndarray) -> Iterator[Permutation]:
    """Every permutation ``p`` with ``sigma[i, p[i]]`` set, in lexicographic order."""
    sigma = np.asarray(sigma, dtype=bool)
    m = sigma.shape[0]
    options = [list(np.nonzero(sigma[i])[0]) for i in range(m)]
    image: list[int] = []
    used = [False] * m

    def rec(i: int) -> Iterator[Permutation]:
        if i == m:
            yield tuple(int(x) for x in image)
            return
        for j in options[i]:
            if not used[j]:
                used[j] = True
                image.append(j)
                yield from rec(i + 1)
                image.pop()
                used[j] = False

    yield from rec(0)


def enumerate_and_verify(
    sigma: np.ndarray,
    g1: Graph,
    g2: Graph,
    cap: int,
    atol: float | None = None,
) -> Permutation | None:
    """Search the support of ``sigma`` for an adjacency-preserving bijection.

    Partial assignments are checked against already-placed vertices, so
    whole subtrees die as soon as one edge disagrees. ``cap`` bounds the
    number of search nodes; exceeding it raises ``EnumerationCapExceeded``.
    Equality is exact for simple graphs and within ``1e-12`` otherwise.
    """
    sigma = np.asarray(sigma, dtype=bool)
    m = sigma.shape[0]
    a1, a2 = g1.adjacency, g2.adjacency
    if atol is None:
        atol = 0.0 if (g1.is_simple and g2.is_simple) else 1e-12
    options = [list(np.nonzero(sigma[i])[0]) for i in range(m)]
    if any(not o for o in options):
        return None
    order = sorted(range(m), key=lambda i: (len(options[i]), i))
    image = [-1] * m
    used = [False] * m
    nodes = 0

    def consistent(v: int, w: int, placed: Sequence[int]) -> bool:
        if abs(a1[v, v] - a2[w, w]) > atol:
            return False
        return all(abs(a1[v, u] - a2[w, image[u]]) <= atol for u in placed)

    def rec(depth: int) -> bool:
        nonlocal nodes
        if depth == m:
            return True
        v = order[depth]
        placed = order[:depth]
        for w in options[v]:
            if used[w]:
                continue
            nodes += 1
            if nodes > cap:
                raise EnumerationCapExceeded(f"more than {cap} search nodes")
            if not consistent(v, w, placed):
                continue
            image[v], used[w] = int(w), True
            if rec(depth + 1):
                return True
            image[v], used[w] = -1, False
        return False

    return tuple(image) if rec(0) else None
