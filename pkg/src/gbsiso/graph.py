"""Graph representation, text formats, generators and the brute-force oracle.

A graph is kept as a dense symmetric adjacency matrix. Permutations are
stored as integer sequences ``perm`` where ``perm[i]`` is the image of vertex
``i``; applying ``perm`` to ``A`` gives ``B`` with ``B[perm[i], perm[j]] ==
A[i, j]``, i.e. ``B = P A P^T`` for the permutation matrix ``P[perm[i], i] = 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphFormatError, GuardError, NumericError

Permutation = tuple[int, ...]

_G6_OFFSET = 63
_G6_SHORT_MAX = 62
_G6_MEDIUM_MAX = 258047


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph held as a symmetric adjacency matrix."""

    adjacency: np.ndarray
    label: str | None = None

    def __post_init__(self) -> None:
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("a graph needs at least one vertex")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def order(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_simple(self) -> bool:
        a = self.adjacency
        return bool(np.all((a == 0) | (a == 1)) and not np.any(np.diag(a)))

    @property
    def edge_count(self) -> int:
        a = self.adjacency
        return int(np.count_nonzero(np.triu(a, 1)) + np.count_nonzero(np.diag(a)))

    def degrees(self) -> np.ndarray:
        return np.count_nonzero(self.adjacency, axis=1)

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency))
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __repr__(self) -> str:
        name = f" {self.label!r}" if self.label else ""
        return f"<Graph{name} M={self.order} edges={self.edge_count}>"

    @classmethod
    def from_edges(cls, order: int, edges: Iterable[tuple[int, int]], label: str | None = None) -> "Graph":
        a = np.zeros((order, order))
        for i, j in edges:
            a[i, j] = a[j, i] = 1.0
        return cls(a, label)


@dataclass(frozen=True)
class Spectrum:
    """Adjacency eigenvalues sorted in descending order."""

    values: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.values)

    def multiplicities(self, tol: float = 1e-9) -> list[tuple[float, int]]:
        groups: list[tuple[float, int]] = []
        for v in self.values:
            if groups and abs(groups[-1][0] - v) <= tol:
                head, count = groups[-1]
                groups[-1] = (head, count + 1)
            else:
                groups.append((float(v), 1))
        return groups

    def __repr__(self) -> str:
        return "Spectrum(" + ", ".join(f"{v:.6g}" for v in self.values) + ")"


# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------

def _g6_size_bytes(n: int) -> bytes:
    if n <= _G6_SHORT_MAX:
        return bytes([n + _G6_OFFSET])
    if n <= _G6_MEDIUM_MAX:
        return bytes([126] + [((n >> s) & 63) + _G6_OFFSET for s in (12, 6, 0)])
    return bytes([126, 126] + [((n >> s) & 63) + _G6_OFFSET for s in (30, 24, 18, 12, 6, 0)])


def emit_graph6(g: Graph) -> str:
    """Encode a simple graph as a graph6 line (no trailing newline)."""
    if not g.is_simple:
        raise GraphFormatError("graph6 can only encode simple graphs")
    n = g.order
    a = g.adjacency
    bits = [1 if a[i, j] else 0 for j in range(1, n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = bytes(
        _G6_OFFSET + int("".join(map(str, bits[k:k + 6])), 2) for k in range(0, len(bits), 6)
    )
    return (_g6_size_bytes(n) + body).decode("ascii")


def parse_graph6(text: str) -> Graph:
    """Decode one graph6 line into a simple graph."""
    line = text.strip()
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<"):]
    if not line:
        raise GraphFormatError("empty graph6 string")
    data = line.encode("ascii", errors="replace")
    for pos, b in enumerate(data):
        if not 63 <= b <= 126:
            raise GraphFormatError(f"byte {pos}: value {b} outside graph6 range 63..126")

    if data[0] != 126:
        n, pos = data[0] - _G6_OFFSET, 1
    elif len(data) > 1 and data[1] == 126:
        if len(data) < 8:
            raise GraphFormatError("byte 2: truncated 8-byte size header")
        n, pos = 0, 8
        for b in data[2:8]:
            n = (n << 6) | (b - _G6_OFFSET)
    else:
        if len(data) < 4:
            raise GraphFormatError("byte 1: truncated 4-byte size header")
        n, pos = 0, 4
        for b in data[1:4]:
            n = (n << 6) | (b - _G6_OFFSET)
    if n < 1:
        raise GraphFormatError("byte 0: graph order must be at least 1")

    nbits = n * (n - 1) // 2
    nbytes = -(-nbits // 6)
    body = data[pos:]
    if len(body) != nbytes:
        raise GraphFormatError(
            f"byte {pos}: expected {nbytes} edge bytes for n={n}, found {len(body)}"
        )
    bits = []
    for b in body:
        v = b - _G6_OFFSET
        bits.extend((v >> s) & 1 for s in range(5, -1, -1))
    if any(bits[nbits:]):
        raise GraphFormatError(f"byte {pos + nbytes - 1}: non-zero padding bits")

    a = np.zeros((n, n))
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                a[i, j] = a[j, i] = 1.0
            k += 1
    return Graph(a)


# ---------------------------------------------------------------------------
# edge list
# ---------------------------------------------------------------------------

def parse_edge_list(text: str, simple: bool | None = None) -> Graph:
    """Parse ``M`` followed by ``i j [w]`` lines.

    With ``simple=None`` the mode is inferred: any weight column makes the
    graph weighted (self-loops allowed, last write wins), otherwise it is
    simple (self-loops rejected, duplicates collapse).
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            lines.append((lineno, content.split()))
    if not lines:
        raise GraphFormatError("edge list is empty")
    lineno, head = lines[0]
    try:
        (n,) = map(int, head)
    except ValueError:
        raise GraphFormatError(f"line {lineno}: expected a single vertex count, got {head!r}") from None
    if n < 1:
        raise GraphFormatError(f"line {lineno}: vertex count must be positive")

    weighted = any(len(tok) == 3 for _, tok in lines[1:]) if simple is None else not simple
    a = np.zeros((n, n))
    for lineno, tok in lines[1:]:
        if len(tok) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'i j [w]', got {' '.join(tok)!r}")
        try:
            i, j = int(tok[0]), int(tok[1])
            w = float(tok[2]) if len(tok) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-numeric field in {' '.join(tok)!r}") from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"line {lineno}: vertex index out of range 0..{n - 1}")
        if not weighted:
            if i == j:
                raise GraphFormatError(f"line {lineno}: self-loop {i} in simple mode")
            if w != 1.0:
                raise GraphFormatError(f"line {lineno}: weight {w} in simple mode")
        a[i, j] = a[j, i] = w
    return Graph(a)


def emit_edge_list(g: Graph) -> str:
    out = [str(g.order)]
    simple = g.is_simple
    for i, j in g.edges():
        out.append(f"{i} {j}" if simple else f"{i} {j} {float(g.adjacency[i, j])!r}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def spectrum(g: Graph) -> Spectrum:
    a = g.adjacency
    try:
        w, q = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}") from exc
    residual = np.linalg.norm(q @ np.diag(w) @ q.T - a)
    if residual > 1e-10 * max(np.linalg.norm(a), 1.0):
        raise NumericError(f"eigendecomposition residual {residual:.3e} too large")
    return Spectrum(w[::-1].copy())


def spectral_gate(g1: Graph, g2: Graph, tol: float = 1e-9) -> bool:
    """True when the two sorted adjacency spectra agree entrywise within ``tol``."""
    if g1.order != g2.order:
        return False
    return bool(np.all(np.abs(spectrum(g1).values - spectrum(g2).values) <= tol))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

MODELS = ("erdos_renyi", "random_regular", "complete", "path", "cycle", "star", "empty")


def generate(model: str, order: int, seed: int = 0, *, p: float | None = None, d: int | None = None) -> Graph:
    """Build a graph from a named model; random models are reproducible per seed."""
    if order < 1:
        raise ValueError("order must be positive")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    n = order
    if model == "complete":
        return Graph(np.ones((n, n)) - np.eye(n), f"K{n}")
    if model == "empty":
        return Graph(np.zeros((n, n)), f"E{n}")
    if model == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"P{n}")
    if model == "cycle":
        if n < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")
    if model == "star":
        return Graph.from_edges(n, [(0, i) for i in range(1, n)], f"K1,{n - 1}")
    if model == "erdos_renyi":
        if p is None or not 0.0 <= p <= 1.0:
            raise ValueError("erdos_renyi needs 0 <= p <= 1")
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((n, n)) < p, 1)
        return Graph((upper | upper.T).astype(float), f"ER({n},{p},{seed})")
    if model == "random_regular":
        if d is None or not 0 <= d < n or (d * n) % 2:
            raise ValueError(f"no {d}-regular graph on {n} vertices")
        import networkx as nx

        h = nx.random_regular_graph(d, n, seed=seed)
        return Graph(nx.to_numpy_array(h, nodelist=range(n)), f"RR({n},{d},{seed})")
    raise ValueError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")


def apply_permutation(a: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Return ``B`` with ``B[perm[i], perm[j]] = a[i, j]``."""
    perm = np.asarray(perm, dtype=int)
    b = np.empty_like(a)
    b[np.ix_(perm, perm)] = a
    return b


def is_witness(g1: Graph, g2: Graph, perm: Sequence[int], atol: float = 0.0) -> bool:
    if g1.order != g2.order or sorted(perm) != list(range(g1.order)):
        return False
    diff = np.abs(apply_permutation(g1.adjacency, perm) - g2.adjacency)
    return bool(np.all(diff <= atol))


def isomorphic_copy(g: Graph, seed: int = 0, perm: Sequence[int] | None = None) -> tuple[Graph, Permutation]:
    """Relabel ``g`` by a seeded random permutation (or an explicit one)."""
    if perm is None:
        perm = np.random.default_rng(seed).permutation(g.order)
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(g.order)):
        raise ValueError("perm is not a permutation of the vertex set")
    label = f"{g.label}~{seed}" if g.label else None
    return Graph(apply_permutation(g.adjacency, perm), label), perm


# ---------------------------------------------------------------------------
# ground truth
# ---------------------------------------------------------------------------

BRUTE_FORCE_MAX_ORDER = 10


def _vertex_signatures(a: np.ndarray) -> list[tuple]:
    rowsum = a.sum(axis=1)
    sigs = []
    for i in range(a.shape[0]):
        nbrs = np.nonzero(a[i])[0]
        sigs.append((tuple(sorted(a[i])), a[i, i], tuple(sorted(rowsum[nbrs]))))
    return sigs


def brute_force_isomorphism(g1: Graph, g2: Graph, max_order: int = BRUTE_FORCE_MAX_ORDER) -> Permutation | None:
    """Exhaustive backtracking search for ``perm`` with ``perm(A1) == A2``.

    Vertices are matched only to vertices with the same sorted row and the
    same multiset of neighbour row sums, and are placed in order of
    decreasing degree so that failures surface early.
    """
    n = g1.order
    if n != g2.order:
        return None
    if n > max_order:
        raise GuardError(f"brute force limited to M <= {max_order}, got {n}")
    a1, a2 = g1.adjacency, g2.adjacency
    s1, s2 = _vertex_signatures(a1), _vertex_signatures(a2)
    if sorted(s1) != sorted(s2):
        return None

    order = sorted(range(n), key=lambda v: (-np.count_nonzero(a1[v]), s1[v]))
    options = {v: [w for w in range(n) if s2[w] == s1[v]] for v in order}
    image = [-1] * n
    used = [False] * n

    def extend(depth: int) -> bool:
        if depth == n:
            return True
        v = order[depth]
        placed = order[:depth]
        for w in options[v]:
            if used[w]:
                continue
            if a1[v, v] != a2[w, w]:
                continue
            if any(a1[v, u] != a2[w, image[u]] for u in placed):
                continue
            image[v], used[w] = w, True
            if extend(depth + 1):
                return True
            image[v], used[w] = -1, False
        return False

    if extend(0):
        return tuple(image)
    return None
