"""k-packing independent sets and the two rounding procedures.

A k-packing independent set is an independent set (so no self-looped
member) such that every vertex has at most ``k`` out-neighbours inside it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .domination import TOL, PackingSolution, dual_violation
from .errors import ContractViolation, NotOneDegenerate, TooLarge
from .graph import DirectedGraph, RemoveInEdge, degeneracy_certificate

BRUTEFORCE_LIMIT = 20


@dataclass(frozen=True)
class KPackingSet:
    vertices: frozenset[int]
    k: int

    def __len__(self):
        return len(self.vertices)


def is_independent(g: DirectedGraph, s) -> bool:
    s = set(s)
    return not any(u in s and v in s for u, v in g.edges)


def packing_load(g: DirectedGraph, s) -> int:
    """Largest number of out-neighbours any vertex has inside ``s``."""
    s = set(s)
    return max((len(g.out_nbrs[v] & s) for v in range(g.n)), default=0)


def verify_k_packing(g: DirectedGraph, s, k: int) -> bool:
    s = set(s)
    if not s <= set(range(g.n)):
        raise ValueError("set contains vertices outside the graph")
    return is_independent(g, s) and packing_load(g, s) <= k


def _is_vertex_packing(g: DirectedGraph, s) -> bool:
    return set(s) <= g.self_loop_free and packing_load(g, s) <= 1


def greedy_one_packing(g: DirectedGraph, packing) -> KPackingSet:
    """Thin a vertex packing set down to a 1-packing independent set.

    Repeatedly keeps the member with fewest in-neighbours among the
    remaining members (lowest index on ties) and discards its in- and
    out-neighbours. Each round discards at most three members, so at
    least a third of the input survives.
    """
    s = packing.support if isinstance(packing, PackingSolution) else frozenset(packing)
    if isinstance(packing, PackingSolution) and not packing.integral:
        raise ContractViolation("greedy_one_packing needs an integral packing")
    if not _is_vertex_packing(g, s):
        raise ContractViolation("input is not a vertex packing set on U")
    left = set(s)
    kept = []
    while left:
        v = min(sorted(left), key=lambda w: len(g.in_nbrs[w] & left))
        kept.append(v)
        left -= g.in_nbrs[v] | g.out_nbrs[v] | {v}
    return KPackingSet(frozenset(kept), 1)


def degenerate_round(g: DirectedGraph, fractional: PackingSolution | None = None) -> PackingSolution:
    """Round a packing-LP solution on a 1-degenerate graph without loss.

    Replays a degeneracy certificate. Whenever an undecided self-loop-free
    vertex ``i`` loses its last in-edge ``(j, i)``, it joins the packing
    and every other undecided self-loop-free out-neighbour of ``j`` is
    excluded. The result never has smaller value than any feasible
    fractional solution.
    """
    if fractional is not None and dual_violation(g, fractional.y) > TOL:
        raise ContractViolation("fractional input is infeasible for the packing LP")
    cert = degeneracy_certificate(g)
    if cert is None:
        raise NotOneDegenerate("graph has no 1-degeneracy certificate")
    U = g.self_loop_free
    outs = [set(s) for s in g.out_nbrs]
    decided: dict[int, int] = {}
    for step in cert:
        if step.edge is not None:
            j, i = step.edge
            outs[j].discard(i)
        if isinstance(step, RemoveInEdge):
            j, i = step.edge
            if i in U and i not in decided:
                decided[i] = 1
                for k in outs[j]:
                    if k in U and k != i:
                        if decided.get(k) == 1:
                            raise ContractViolation(f"rounding conflict at vertex {k}")
                        decided[k] = 0
    # undecided vertices only arise for certificates that remove a vertex
    # before its target's in-degree reached one; add them while feasible
    chosen = {v for v, b in decided.items() if b}
    for v in sorted(U - decided.keys()):
        if _is_vertex_packing(g, chosen | {v}):
            chosen.add(v)
    result = PackingSolution.from_set(g, chosen)
    if dual_violation(g, result.y) > 0:
        raise ContractViolation("rounded solution is infeasible")
    if fractional is not None and result.value < fractional.value - Fraction(1, 10**9):
        raise ContractViolation("rounding lost value")
    return result


def max_k_packing_bruteforce(g: DirectedGraph, k: int) -> KPackingSet:
    """Maximum k-packing independent set by exhaustive branch and bound."""
    if g.n > BRUTEFORCE_LIMIT:
        raise TooLarge(f"brute force limited to n <= {BRUTEFORCE_LIMIT}")
    cand = [v for v in range(g.n) if not g.has_self_loop(v)]
    nbr = {v: (g.in_nbrs[v] | g.out_nbrs[v]) for v in cand}
    load = [0] * g.n
    best: list[int] = []
    chosen: list[int] = []

    def grow(idx):
        nonlocal best
        if len(chosen) + (len(cand) - idx) <= len(best):
            return
        if idx == len(cand):
            best = list(chosen)
            return
        v = cand[idx]
        ok = all(u not in nbr[v] for u in chosen) and all(load[w] < k for w in g.in_nbrs[v])
        if ok:
            for w in g.in_nbrs[v]:
                load[w] += 1
            chosen.append(v)
            grow(idx + 1)
            chosen.pop()
            for w in g.in_nbrs[v]:
                load[w] -= 1
        grow(idx + 1)

    grow(0)
    return KPackingSet(frozenset(best), k)
