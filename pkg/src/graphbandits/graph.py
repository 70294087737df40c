"""Directed feedback graphs.

Vertices are ``0..n-1``. Pulling arm ``i`` reveals the loss of every ``j``
with ``(i, j)`` an edge, so ``in_nbrs[j]`` is the set of arms that observe
``j``. Self-loops are allowed and matter: the vertices *without* one form
the set ``U`` that exploration has to cover.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import GraphParseError

Edge = tuple[int, int]

# exhaustive search for a 1-degeneracy certificate only below this size
SEARCH_LIMIT = 20


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    edges: frozenset[Edge]
    in_nbrs: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    out_nbrs: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for u, v in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
        ins = [set() for _ in range(self.n)]
        outs = [set() for _ in range(self.n)]
        for u, v in edges:
            outs[u].add(v)
            ins[v].add(u)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "in_nbrs", tuple(frozenset(s) for s in ins))
        object.__setattr__(self, "out_nbrs", tuple(frozenset(s) for s in outs))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "DirectedGraph":
        """Build a graph, rejecting repeated edges instead of merging them."""
        edges = [tuple(e) for e in edges]
        seen = set()
        for e in edges:
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(edges))

    @classmethod
    def undirected(cls, n: int, pairs: Iterable[Edge], loops: Iterable[int] = ()) -> "DirectedGraph":
        """Each unordered pair becomes two arcs; ``loops`` adds self-loops."""
        arcs = set()
        for u, v in pairs:
            arcs.add((u, v))
            arcs.add((v, u))
        arcs.update((v, v) for v in loops)
        return cls(n, frozenset(arcs))

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def has_self_loop(self, v: int) -> bool:
        return (v, v) in self.edges

    @property
    def self_loop_free(self) -> frozenset[int]:
        return frozenset(v for v in range(self.n) if (v, v) not in self.edges)

    def adjacency(self) -> np.ndarray:
        """Boolean matrix with ``A[u, v]`` true iff ``(u, v)`` is an edge."""
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = True
        return a

    def relabel(self, perm) -> "DirectedGraph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return DirectedGraph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def add_vertex(self, self_loop: bool = False) -> "DirectedGraph":
        extra = {(self.n, self.n)} if self_loop else set()
        return DirectedGraph(self.n + 1, self.edges | extra)


class Observability(enum.Enum):
    STRONGLY = "strongly"
    WEAKLY = "weakly"
    NON = "non"


def classify(g: DirectedGraph) -> Observability:
    if any(not g.in_nbrs[v] for v in range(g.n)):
        return Observability.NON
    for v in range(g.n):
        if g.has_self_loop(v):
            continue
        if len(g.in_nbrs[v]) < g.n - 1:
            return Observability.WEAKLY
    return Observability.STRONGLY


def self_loop_free_set(g: DirectedGraph) -> frozenset[int]:
    return g.self_loop_free


# --- 1-degeneracy ---------------------------------------------------------


class RemoveInEdge(NamedTuple):
    vertex: int
    edge: Edge


class RemoveVertex(NamedTuple):
    vertex: int
    edge: Edge | None


Step = RemoveInEdge | RemoveVertex


@dataclass(frozen=True)
class DegeneracyCertificate:
    steps: tuple[Step, ...]

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


class _Reducer:
    """Mutable working copy used to apply reduction steps."""

    def __init__(self, g: DirectedGraph):
        self.alive = set(range(g.n))
        self.ins = [set(s) for s in g.in_nbrs]
        self.outs = [set(s) for s in g.out_nbrs]

    def empty(self):
        return not self.alive

    def applicable(self):
        ops = []
        for v in sorted(self.alive):
            if len(self.ins[v]) == 1:
                (u,) = self.ins[v]
                ops.append(RemoveInEdge(v, (u, v)))
        for v in sorted(self.alive):
            if not self.ins[v] and len(self.outs[v]) <= 1:
                out = next(iter(self.outs[v]), None)
                ops.append(RemoveVertex(v, None if out is None else (v, out)))
        return ops

    def check(self, step: Step) -> bool:
        v = step.vertex
        if v not in self.alive:
            return False
        if isinstance(step, RemoveInEdge):
            u, w = step.edge
            return w == v and self.ins[v] == {u}
        if self.ins[v] or len(self.outs[v]) > 1:
            return False
        if step.edge is None:
            return not self.outs[v]
        return step.edge[0] == v and self.outs[v] == {step.edge[1]}

    def apply(self, step: Step):
        v = step.vertex
        if step.edge is not None:
            u, w = step.edge
            self.outs[u].discard(w)
            self.ins[w].discard(u)
        if isinstance(step, RemoveVertex):
            self.alive.discard(v)

    def key(self):
        return (frozenset(self.alive),
                frozenset((u, w) for u in self.alive for w in self.outs[u]))


def greedy_certificate(g: DirectedGraph) -> DegeneracyCertificate | None:
    """Apply the lowest applicable operation until stuck.

    Edge removals on in-degree-one vertices are preferred over vertex
    removals; within a kind the lowest vertex index goes first.
    """
    r = _Reducer(g)
    steps = []
    while not r.empty():
        ops = r.applicable()
        if not ops:
            return None
        r.apply(ops[0])
        steps.append(ops[0])
    return DegeneracyCertificate(tuple(steps))


def search_certificate(g: DirectedGraph) -> DegeneracyCertificate | None:
    """Exhaustive depth-first search over operation orders (memoised on state)."""
    if g.n > SEARCH_LIMIT:
        raise ValueError(f"exhaustive degeneracy search limited to n <= {SEARCH_LIMIT}")
    dead = set()

    def dfs(r: _Reducer, steps):
        if r.empty():
            return list(steps)
        key = r.key()
        if key in dead:
            return None
        for op in r.applicable():
            child = _Reducer.__new__(_Reducer)
            child.alive = set(r.alive)
            child.ins = [set(s) for s in r.ins]
            child.outs = [set(s) for s in r.outs]
            child.apply(op)
            steps.append(op)
            found = dfs(child, steps)
            if found is not None:
                return found
            steps.pop()
        dead.add(key)
        return None

    found = dfs(_Reducer(g), [])
    return None if found is None else DegeneracyCertificate(tuple(found))


def degeneracy_certificate(g: DirectedGraph) -> DegeneracyCertificate | None:
    """A certificate that ``g`` is 1-degenerate, or None.

    None is definitive for ``n <= SEARCH_LIMIT``; above that only the greedy
    order is tried, see :func:`degeneracy_status`.
    """
    cert = greedy_certificate(g)
    if cert is not None or g.n > SEARCH_LIMIT:
        return cert
    return search_certificate(g)


def degeneracy_status(g: DirectedGraph) -> str:
    """One of ``"degenerate"``, ``"not_degenerate"`` or ``"unknown"``."""
    if degeneracy_certificate(g) is not None:
        return "degenerate"
    return "not_degenerate" if g.n <= SEARCH_LIMIT else "unknown"


def degeneracy_report(g: DirectedGraph) -> dict:
    greedy = greedy_certificate(g) is not None
    search = search_certificate(g) is not None if g.n <= SEARCH_LIMIT else None
    return {
        "greedy": greedy,
        "search": search,
        "disagree": search is not None and search != greedy,
    }


def replay_certificate(g: DirectedGraph, cert: DegeneracyCertificate) -> bool:
    """True iff every step is applicable when reached and the graph ends empty."""
    r = _Reducer(g)
    for step in cert:
        if not r.check(step):
            return False
        r.apply(step)
    return r.empty()


# --- edge-list files -------------------------------------------------------


def parse_graph(text: str) -> DirectedGraph:
    n = None
    edges = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphParseError(lineno, f"expected vertex count, got {line!r}")
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphParseError(lineno, f"vertex count is not an integer: {line!r}") from None
            if n < 0:
                raise GraphParseError(lineno, "vertex count must be nonnegative")
            continue
        if len(parts) != 2:
            raise GraphParseError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(lineno, f"non-integer vertex in {line!r}") from None
        for w in (u, v):
            if not 0 <= w < n:
                raise GraphParseError(lineno, f"vertex {w} out of range")
        if (u, v) in seen:
            raise GraphParseError(lineno, f"duplicate edge {u} {v} (first on line {seen[u, v]})")
        seen[u, v] = lineno
        edges.append((u, v))
    if n is None:
        raise GraphParseError(0, "empty graph file")
    return DirectedGraph(n, frozenset(edges))


def serialize_graph(g: DirectedGraph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def read_graph(path) -> DirectedGraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: DirectedGraph, path):
    Path(path).write_text(serialize_graph(g))
