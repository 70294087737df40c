import math

import numpy as np
import pytest

from graphbandits.domination import PackingSolution, integral_zeta, solve_dual
from graphbandits.errors import ContractViolation, NotOneDegenerate, TooLarge
from graphbandits.families import (clique, directed_cycle, directed_path, directed_tree, figure1, matching,
                                   random_digraph, random_oriented_tree, random_weakly_observable)
from graphbandits.packing import (degenerate_round, greedy_one_packing, max_k_packing_bruteforce,
                                  verify_k_packing)
from oracles import naive_k_packing


def test_verify_k_packing():
    g = matching(3)
    assert verify_k_packing(g, {3, 4, 5}, 1)
    assert not verify_k_packing(g, {0}, 1)  # self-looped, not independent
    star = directed_path(3)
    assert not verify_k_packing(star, {0, 1}, 1)  # adjacent
    with pytest.raises(ValueError):
        verify_k_packing(g, {9}, 1)


def test_greedy_one_packing_bound_on_random_graphs():
    rng = np.random.default_rng(21)
    for _ in range(100):
        g = random_digraph(int(rng.integers(3, 11)), rng, rng.uniform(0.1, 0.4), rng.uniform(0, 0.5))
        z = integral_zeta(g)
        h = greedy_one_packing(g, z.witness)
        assert verify_k_packing(g, h.vertices, 1)
        assert len(h) >= math.ceil(z.value / 3)
        assert h.vertices <= z.witness


def test_greedy_rejects_non_packing():
    g = clique(3, loops=False)
    with pytest.raises(ContractViolation):
        greedy_one_packing(g, {0, 1})
    with pytest.raises(ContractViolation):
        greedy_one_packing(g, solve_dual(g))  # fractional input


def test_greedy_accepts_integral_solution():
    g = directed_path(4)
    z = integral_zeta(g)
    h = greedy_one_packing(g, PackingSolution.from_set(g, z.witness))
    assert verify_k_packing(g, h.vertices, 1)


def test_degenerate_round_on_trees_and_cycles():
    rng = np.random.default_rng(22)
    graphs = [random_oriented_tree(int(rng.integers(2, 14)), rng) for _ in range(30)]
    graphs += [directed_cycle(n) for n in range(2, 10)] + [directed_tree([0, 1, 2, 3], root_loop=True), figure1()]
    for g in graphs:
        frac = solve_dual(g)
        r = degenerate_round(g, frac)
        assert r.integral and r.value == frac.value
        assert r.value == integral_zeta(g).value


def test_degenerate_round_rejects():
    with pytest.raises(NotOneDegenerate):
        degenerate_round(clique(4, loops=False))
    g = directed_cycle(3)
    bad = PackingSolution({0: 2}, 2)
    with pytest.raises(ContractViolation):
        degenerate_round(g, bad)


def test_bruteforce_matches_enumeration():
    rng = np.random.default_rng(23)
    for _ in range(60):
        n = int(rng.integers(3, 8))
        g = random_weakly_observable(n, rng)
        for k in (1, 2):
            s = max_k_packing_bruteforce(g, k)
            assert verify_k_packing(g, s.vertices, k)
            assert len(s) == naive_k_packing(n, g.edges, k)


def test_bruteforce_limit():
    with pytest.raises(TooLarge):
        max_k_packing_bruteforce(matching(11), 1)
