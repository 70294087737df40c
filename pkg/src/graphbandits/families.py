"""Named graph families and random graph generators."""
from __future__ import annotations

import numpy as np

from .errors import BadInput
from .graph import DirectedGraph, Observability, classify

FIGURE1_LABELS = ("A", "B", "C", "D")


def gen_complete_bipartite(a: int, b: int) -> DirectedGraph:
    """Undirected K_{a,b}: sides ``0..a-1`` and ``a..a+b-1``, no self-loops."""
    if a < 1 or b < 1:
        raise BadInput("both sides of K_{a,b} need at least one vertex")
    return DirectedGraph.undirected(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def gen_orthogonal_f2k(k: int) -> DirectedGraph:
    """Orthogonality graph over GF(2)^k.

    Vertex ``alpha`` (``0 <= alpha < 2**k``) stands for a vector of the
    clique side; vertex ``2**k + beta - 1`` for a nonzero ``beta`` on the
    independent side. Cross pairs are joined iff the inner product is 1.
    """
    if not 2 <= k <= 12:
        raise BadInput("k must lie in [2, 12]")
    m = 1 << k
    pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    for alpha in range(m):
        for beta in range(1, m):
            if bin(alpha & beta).count("1") % 2 == 1:
                pairs.append((alpha, m + beta - 1))
    return DirectedGraph.undirected(2 * m - 1, pairs)


def orthogonal_sides(k: int) -> tuple[list[int], list[int]]:
    m = 1 << k
    return list(range(m)), list(range(m, 2 * m - 1))


def figure1() -> DirectedGraph:
    """A->C, B->C, C<->D, with self-loops on A and B (A,B,C,D = 0,1,2,3)."""
    return DirectedGraph(4, frozenset({(0, 2), (1, 2), (2, 3), (3, 2), (0, 0), (1, 1)}))


def undirected_cycle(n: int) -> DirectedGraph:
    if n < 3:
        raise BadInput("a cycle needs at least 3 vertices")
    return DirectedGraph.undirected(n, [(i, (i + 1) % n) for i in range(n)])


def directed_cycle(n: int) -> DirectedGraph:
    if n < 2:
        raise BadInput("a directed cycle needs at least 2 vertices")
    return DirectedGraph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def directed_path(n: int) -> DirectedGraph:
    return DirectedGraph(n, frozenset((i, i + 1) for i in range(n - 1)))


def directed_tree(parents, root_loop: bool = False) -> DirectedGraph:
    """Arborescence where vertex ``i + 1`` hangs below ``parents[i]``."""
    n = len(parents) + 1
    edges = set()
    for child, p in enumerate(parents, start=1):
        if not 0 <= p < child:
            raise BadInput(f"parent {p} of vertex {child} must precede it")
        edges.add((p, child))
    if root_loop:
        edges.add((0, 0))
    return DirectedGraph(n, frozenset(edges))


def out_star(m: int, loops: bool = False) -> DirectedGraph:
    """Centre 0 pointing at leaves ``1..m``."""
    edges = {(0, i) for i in range(1, m + 1)}
    if loops:
        edges.add((0, 0))
    return DirectedGraph(m + 1, frozenset(edges))


def in_star(m: int) -> DirectedGraph:
    """Leaves ``1..m`` pointing at centre 0."""
    return DirectedGraph(m + 1, frozenset((i, 0) for i in range(1, m + 1)))


def clique(n: int, loops: bool = True) -> DirectedGraph:
    edges = {(u, v) for u in range(n) for v in range(n) if loops or u != v}
    return DirectedGraph(n, frozenset(edges))


def matching(m: int) -> DirectedGraph:
    """Observers ``0..m-1`` with self-loops, each seeing one private target ``m + i``.

    The targets form a 1-packing independent set of size ``m``.
    """
    edges = {(i, i) for i in range(m)} | {(i, m + i) for i in range(m)}
    return DirectedGraph(2 * m, frozenset(edges))


def _ints(arg: str) -> list[int]:
    return [int(t) for t in arg.replace(";", ",").split(",") if t.strip()]


_CATALOGUE = {
    "figure1": lambda arg: figure1(),
    "undirected_cycle": lambda arg: undirected_cycle(int(arg)),
    "directed_cycle": lambda arg: directed_cycle(int(arg)),
    "directed_path": lambda arg: directed_path(int(arg)),
    "directed_tree": lambda arg: directed_tree(_ints(arg)),
    "out_star": lambda arg: out_star(int(arg)),
    "in_star": lambda arg: in_star(int(arg)),
    "clique": lambda arg: clique(int(arg)),
    "complete_bipartite": lambda arg: gen_complete_bipartite(*_ints(arg)),
    "orthogonal": lambda arg: gen_orthogonal_f2k(int(arg)),
    "matching": lambda arg: matching(int(arg)),
}


def gen_named(name: str) -> DirectedGraph:
    """Look up ``"family"`` or ``"family:args"``, e.g. ``"complete_bipartite:2,3"``."""
    family, _, arg = name.partition(":")
    if family not in _CATALOGUE:
        raise BadInput(f"unknown graph {family!r}; catalogue: {', '.join(sorted(_CATALOGUE))}")
    try:
        return _CATALOGUE[family](arg)
    except (TypeError, ValueError) as exc:
        raise BadInput(f"bad arguments for {family!r}: {exc}") from None


def catalogue() -> list[str]:
    return sorted(_CATALOGUE)


# --- random graphs ----------------------------------------------------------


def random_digraph(n: int, rng: np.random.Generator, p: float = 0.3, loop_p: float = 0.3):
    adj = rng.random((n, n)) < p
    loops = rng.random(n) < loop_p
    np.fill_diagonal(adj, loops)
    rows, cols = np.nonzero(adj)
    return DirectedGraph(n, frozenset(zip(rows.tolist(), cols.tolist())))


def random_weakly_observable(n: int, rng: np.random.Generator, p: float | None = None,
                             loop_p: float | None = None) -> DirectedGraph:
    """Rejection-sample a weakly observable digraph on ``n`` vertices (n >= 3)."""
    if n < 3:
        raise BadInput("no digraph on fewer than 3 vertices is weakly observable")
    while True:
        pp = rng.uniform(0.15, 0.5) if p is None else p
        lp = rng.uniform(0.0, 0.6) if loop_p is None else loop_p
        g = random_digraph(n, rng, pp, lp)
        if classify(g) is Observability.WEAKLY:
            return g


def random_oriented_tree(n: int, rng: np.random.Generator) -> DirectedGraph:
    """Random labelled tree, each edge oriented at random (or both ways).

    Vertices left without an in-neighbour get a self-loop so that the
    result is never non-observable.
    """
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(v))
        r = rng.random()
        if r < 0.4:
            edges.add((u, v))
        elif r < 0.8:
            edges.add((v, u))
        else:
            edges |= {(u, v), (v, u)}
    indeg = [0] * n
    for _, v in edges:
        indeg[v] += 1
    edges |= {(v, v) for v in range(n) if indeg[v] == 0}
    return DirectedGraph(n, frozenset(edges))
