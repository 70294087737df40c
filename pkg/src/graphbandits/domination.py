"""Fractional and integral weak domination / vertex packing numbers.

The covering LP asks for weights ``x`` on all vertices such that every
self-loop-free vertex receives in-neighbour weight at least one; its dual
puts weights ``y`` on the self-loop-free vertices so that no vertex sees
more than one unit among its out-neighbours. Both are solved exactly with
:func:`graphbandits.simplex.linprog_exact`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, InfeasibleError
from .graph import DirectedGraph, Observability, classify
from .simplex import OPTIMAL, linprog_exact

TOL = 1e-6
# above this many vertices the integral optima default to greedy bounds
ENUMERATION_LIMIT = 25


@dataclass(frozen=True)
class DominationSolution:
    x: tuple[Fraction, ...]
    value: Fraction

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.x])

    def exploration(self) -> np.ndarray:
        """The weights normalised to a distribution over arms."""
        if self.value <= 0:
            raise ContractViolation("zero domination weight: nothing to explore")
        return np.array([float(v / self.value) for v in self.x])


@dataclass(frozen=True)
class PackingSolution:
    y: dict  # vertex of U -> weight
    value: Fraction
    integral: bool = False

    @property
    def support(self) -> frozenset[int]:
        return frozenset(j for j, v in self.y.items() if v > 0)

    @classmethod
    def from_set(cls, g: DirectedGraph, s) -> "PackingSolution":
        s = set(s)
        y = {j: Fraction(int(j in s)) for j in sorted(g.self_loop_free)}
        return cls(y, Fraction(len(s & g.self_loop_free)), True)


@dataclass(frozen=True)
class IntegralOptimum:
    value: int
    witness: frozenset[int]
    exact: bool


@dataclass(frozen=True)
class GapReport:
    delta_star: Fraction
    zeta_star: Fraction
    delta: int
    zeta: int
    observability: Observability
    delta_exact: bool = True
    zeta_exact: bool = True

    @property
    def primal_gap(self) -> float:
        return 1.0 if self.delta_star == 0 else float(self.delta / self.delta_star)

    @property
    def dual_gap(self) -> float:
        if self.zeta == 0:
            return 1.0 if self.zeta_star == 0 else float("inf")
        return float(self.zeta_star / self.zeta)

    def to_dict(self) -> dict:
        return {
            "delta_star": float(self.delta_star),
            "zeta_star": float(self.zeta_star),
            "delta": self.delta,
            "zeta": self.zeta,
            "primal_gap": self.primal_gap,
            "dual_gap": self.dual_gap,
            "observability": self.observability.value,
            "delta_exact": self.delta_exact,
            "zeta_exact": self.zeta_exact,
        }


def _check_observable(g: DirectedGraph):
    for j in sorted(g.self_loop_free):
        if not g.in_nbrs[j]:
            raise InfeasibleError(j)


@lru_cache(maxsize=4096)
def solve_primal(g: DirectedGraph) -> DominationSolution:
    _check_observable(g)
    U = sorted(g.self_loop_free)
    cover = [[1 if i in g.in_nbrs[j] else 0 for i in range(g.n)] for j in U]
    bounds = [[1 if i == k else 0 for i in range(g.n)] for k in range(g.n)]
    res = linprog_exact([1] * g.n, bounds, [1] * g.n, cover, [1] * len(U))
    if res.status != OPTIMAL:
        raise ContractViolation(f"covering LP returned {res.status}")
    return DominationSolution(res.x, res.value)


@lru_cache(maxsize=4096)
def solve_dual(g: DirectedGraph) -> PackingSolution:
    _check_observable(g)
    U = sorted(g.self_loop_free)
    rows = []
    for i in range(g.n):
        outs = g.out_nbrs[i] & g.self_loop_free
        if outs:
            rows.append([1 if j in outs else 0 for j in U])
    rows += [[1 if j == k else 0 for j in U] for k in U]
    res = linprog_exact([1] * len(U), rows, [1] * len(rows), maximize=True)
    if res.status != OPTIMAL:
        raise ContractViolation(f"packing LP returned {res.status}")
    return PackingSolution(dict(zip(U, res.x)), res.value, False)


def primal_violation(g: DirectedGraph, x) -> float:
    """Largest constraint violation of ``x`` in the covering LP (0 if feasible)."""
    x = [float(v) for v in x]
    worst = max([0.0] + [max(-v, v - 1) for v in x])
    for j in g.self_loop_free:
        worst = max(worst, 1 - sum(x[i] for i in g.in_nbrs[j]))
    return worst


def dual_violation(g: DirectedGraph, y: dict) -> float:
    """Largest constraint violation of ``y`` in the packing LP (0 if feasible)."""
    U = g.self_loop_free
    if set(y) - U:
        return float("inf")
    worst = max([0.0] + [max(-float(v), float(v) - 1) for v in y.values()])
    for i in range(g.n):
        load = sum(float(y.get(j, 0)) for j in g.out_nbrs[i] & U)
        worst = max(worst, load - 1)
    return worst


def _out_masks(g: DirectedGraph, targets) -> list[int]:
    """Bitmask over ``targets`` of the targets each vertex points at."""
    pos = {j: b for b, j in enumerate(targets)}
    masks = []
    for i in range(g.n):
        m = 0
        for j in g.out_nbrs[i]:
            if j in pos:
                m |= 1 << pos[j]
        masks.append(m)
    return masks


def _greedy_cover(g: DirectedGraph) -> frozenset[int]:
    U = sorted(g.self_loop_free)
    masks = _out_masks(g, U)
    left = (1 << len(U)) - 1
    chosen = []
    while left:
        best = max(range(g.n), key=lambda i: (bin(masks[i] & left).count("1"), -i))
        chosen.append(best)
        left &= ~masks[best]
    return frozenset(chosen)


def integral_delta(g: DirectedGraph, exact: bool | None = None) -> IntegralOptimum:
    """Minimum set whose out-neighbourhoods cover every self-loop-free vertex.

    ``exact=None`` enumerates only when ``n <= ENUMERATION_LIMIT`` and
    otherwise returns a greedy upper bound flagged ``exact=False``.
    ``exact=True`` always enumerates by increasing size, which stays cheap
    while the optimum itself is small.
    """
    _check_observable(g)
    if exact is None:
        exact = g.n <= ENUMERATION_LIMIT
    if not exact:
        w = _greedy_cover(g)
        return IntegralOptimum(len(w), w, False)
    U = sorted(g.self_loop_free)
    target = (1 << len(U)) - 1
    masks = _out_masks(g, U)
    useful = [i for i in range(g.n) if masks[i]]
    for size in range(len(U) + 1):
        for combo in itertools.combinations(useful, size):
            m = 0
            for i in combo:
                m |= masks[i]
            if m == target:
                return IntegralOptimum(size, frozenset(combo), True)
    raise AssertionError("unreachable: U is coverable")


def _conflicts(g: DirectedGraph, U) -> list[int]:
    """Bitmask conflict graph on U: two vertices clash if some vertex points at both."""
    pos = {j: b for b, j in enumerate(U)}
    conf = [0] * len(U)
    for i in range(g.n):
        hit = [pos[j] for j in g.out_nbrs[i] if j in pos]
        for a in hit:
            for b in hit:
                if a != b:
                    conf[a] |= 1 << b
    return conf


def _max_independent(conf: list[int]) -> int:
    best = 0

    def popcount(m):
        return bin(m).count("1")

    def grow(chosen, cand):
        nonlocal best
        if popcount(chosen) + popcount(cand) <= popcount(best):
            return
        if not cand:
            best = chosen
            return
        # branch on the candidate with most conflicts inside cand
        v = max((b for b in range(len(conf)) if cand >> b & 1),
                key=lambda b: popcount(conf[b] & cand))
        bit = 1 << v
        grow(chosen | bit, cand & ~bit & ~conf[v])
        if conf[v] & cand:
            grow(chosen, cand & ~bit)

    grow(0, (1 << len(conf)) - 1)
    return best


def integral_zeta(g: DirectedGraph, exact: bool | None = None) -> IntegralOptimum:
    """Largest vertex packing set: S within U with every vertex pointing at most once into S."""
    U = sorted(g.self_loop_free)
    if exact is None:
        exact = g.n <= ENUMERATION_LIMIT
    conf = _conflicts(g, U)
    if exact:
        chosen = _max_independent(conf)
    else:
        chosen, cand = 0, (1 << len(U)) - 1
        while cand:
            v = min((b for b in range(len(U)) if cand >> b & 1),
                    key=lambda b: bin(conf[b] & cand).count("1"))
            chosen |= 1 << v
            cand &= ~(1 << v) & ~conf[v]
    witness = frozenset(U[b] for b in range(len(U)) if chosen >> b & 1)
    return IntegralOptimum(len(witness), witness, bool(exact))


def gap_report(g: DirectedGraph, exact: bool | None = None) -> GapReport:
    primal = solve_primal(g)
    dual = solve_dual(g)
    if abs(primal.value - dual.value) > TOL:
        raise ContractViolation(f"duality gap {float(primal.value - dual.value)}")
    delta = integral_delta(g, exact)
    zeta = integral_zeta(g, exact)
    if delta.exact and delta.value < primal.value - TOL:
        raise ContractViolation("integral cover smaller than the fractional optimum")
    if zeta.exact and zeta.value > dual.value + TOL:
        raise ContractViolation("integral packing larger than the fractional optimum")
    return GapReport(primal.value, dual.value, delta.value, zeta.value, classify(g),
                     delta.exact, zeta.exact)
