"""Colour refinement (1-WL) and the named graphs used as hard cases."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .graph import Graph


@dataclass(frozen=True)
class Coloring:
    colors: tuple[int, ...]
    rounds: int

    @property
    def classes(self) -> int:
        return len(set(self.colors))

    def class_sizes(self) -> list[int]:
        return sorted(np.bincount(self.colors).tolist()) if self.colors else []


def _signatures(g: Graph, colors: list[int]) -> list[tuple]:
    a = g.adjacency
    sigs = []
    for v in range(g.order):
        nbrs = np.nonzero(a[v])[0]
        sigs.append((colors[v], tuple(sorted((colors[u], float(a[v, u])) for u in nbrs))))
    return sigs


def _relabel(sigs: list[tuple]) -> list[int]:
    # labels follow sorted signature order, never hash values
    index = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [index[s] for s in sigs]


def color_refinement(g: Graph, initial: list[int] | None = None) -> Coloring:
    """Refine vertex colours by neighbour-colour multisets until stable."""
    colors = list(initial) if initial is not None else [0] * g.order
    colors = _relabel([(c,) for c in colors])
    rounds = 0
    while True:
        new = _relabel(_signatures(g, colors))
        if len(set(new)) == len(set(colors)):
            return Coloring(tuple(colors), rounds)
        colors = new
        rounds += 1


def wl1_compare(g1: Graph, g2: Graph) -> str:
    """``"distinguished"`` if joint colour refinement separates the graphs.

    Both graphs are refined with one shared palette; any round in which
    the colour histograms differ proves non-isomorphism. Otherwise the
    result is ``"indeterminate"``.
    """
    if g1.order != g2.order:
        return "distinguished"
    n = g1.order
    colors = [0] * (2 * n)
    while True:
        sigs = _signatures(g1, colors[:n]) + _signatures(g2, colors[n:])
        new = _relabel(sigs)
        if sorted(new[:n]) != sorted(new[n:]):
            return "distinguished"
        if len(set(new)) == len(set(colors)):
            return "indeterminate"
        colors = new


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def shrikhande() -> Graph:
    # Cayley graph on Z4 x Z4 with connection set {+-(1,0), +-(0,1), +-(1,1)}
    gens = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = []
    for (a, b), (c, d) in itertools.combinations(itertools.product(range(4), repeat=2), 2):
        if ((c - a) % 4, (d - b) % 4) in gens:
            edges.append((4 * a + b, 4 * c + d))
    return Graph.from_edges(16, edges, "shrikhande")


def rook4() -> Graph:
    # 4x4 rook's graph: cells sharing a row or a column, i.e. K4 x K4
    edges = [
        (4 * a + b, 4 * c + d)
        for (a, b), (c, d) in itertools.combinations(itertools.product(range(4), repeat=2), 2)
        if (a == c) != (b == d)
    ]
    return Graph.from_edges(16, edges, "rook4")


def petersen() -> Graph:
    # Kneser graph K(5, 2): 2-subsets of a 5-set, adjacent when disjoint
    subsets = list(itertools.combinations(range(5), 2))
    edges = [
        (i, j)
        for (i, s), (j, t) in itertools.combinations(enumerate(subsets), 2)
        if not set(s) & set(t)
    ]
    return Graph.from_edges(10, edges, "petersen")


def star5() -> Graph:
    return Graph.from_edges(5, [(0, i) for i in range(1, 5)], "star5")


def c4k1() -> Graph:
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 0)], "c4k1")


FIXTURES = {
    "shrikhande": shrikhande,
    "rook4": rook4,
    "star5": star5,
    "c4k1": c4k1,
    "petersen": petersen,
}


def fixture(name: str) -> Graph:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}") from None
