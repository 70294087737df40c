"""Independent reference computations used only by the tests.

Everything here is deliberately naive: plain enumeration, scipy's LP solver
and a general-purpose constrained minimiser.
"""
from __future__ import annotations

import itertools
import warnings
from functools import cache

import numpy as np
from scipy.optimize import linprog, minimize


def loop_free(n, edges):
    return [v for v in range(n) if (v, v) not in edges]


def covers(n, edges, s):
    return all(any((i, j) in edges for i in s) for j in loop_free(n, edges))


def naive_delta(n, edges):
    for size in range(n + 1):
        for s in itertools.combinations(range(n), size):
            if covers(n, edges, s):
                return size
    return None


def is_packing(n, edges, s):
    s = set(s)
    return all(sum((i, j) in edges for j in s) <= 1 for i in range(n))


def naive_zeta(n, edges):
    U = loop_free(n, edges)
    for size in range(len(U), -1, -1):
        for s in itertools.combinations(U, size):
            if is_packing(n, edges, s):
                return size
    return 0


def naive_k_packing(n, edges, k):
    U = loop_free(n, edges)
    for size in range(len(U), -1, -1):
        for s in itertools.combinations(U, size):
            ss = set(s)
            if any((a, b) in edges for a in ss for b in ss):
                continue
            if all(sum((i, j) in edges for j in ss) <= k for i in range(n)):
                return size
    return 0


def scipy_primal(n, edges):
    U = loop_free(n, edges)
    A = np.array([[-1.0 if (i, j) in edges else 0.0 for i in range(n)] for j in U]).reshape(len(U), n)
    res = linprog(np.ones(n), A_ub=A if len(U) else None, b_ub=-np.ones(len(U)) if len(U) else None,
                  bounds=[(0, 1)] * n, method="highs")
    assert res.status == 0
    return res.fun


def scipy_dual(n, edges):
    U = loop_free(n, edges)
    if not U:
        return 0.0
    A = np.array([[1.0 if (i, j) in edges else 0.0 for j in U] for i in range(n)])
    res = linprog(-np.ones(len(U)), A_ub=A, b_ub=np.ones(n), bounds=[(0, 1)] * len(U), method="highs")
    assert res.status == 0
    return -res.fun


@cache
def _reducible(vertices: frozenset, edges: frozenset) -> bool:
    if not vertices:
        return True
    for v in vertices:
        ins = [e for e in edges if e[1] == v]
        outs = [e for e in edges if e[0] == v]
        if len(ins) == 1 and _reducible(vertices, edges - {ins[0]}):
            return True
        if not ins and len(outs) <= 1 and _reducible(vertices - {v}, edges - set(outs)):
            return True
    return False


def naive_one_degenerate(n, edges) -> bool:
    return _reducible(frozenset(range(n)), frozenset(edges))


def numeric_md_step(X, lhat, eta):
    """argmin over the simplex of eta <x, lhat> + KL-type Bregman divergence to X."""
    X = np.asarray(X, float)
    lhat = np.asarray(lhat, float)

    def f(x):
        x = np.maximum(x, 1e-300)
        return eta * x @ lhat + np.sum(x * np.log(x / X) - x + X)

    def grad(x):
        x = np.maximum(x, 1e-300)
        return eta * lhat + np.log(x / X)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = minimize(f, X, jac=grad, method="SLSQP",
                       bounds=[(1e-15, 1)] * len(X),
                       constraints=[{"type": "eq", "fun": lambda x: x.sum() - 1,
                                     "jac": lambda x: np.ones_like(x)}],
                       options={"ftol": 1e-16, "maxiter": 1000})
    return res.x
