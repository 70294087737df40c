"""Dense two-phase simplex over exact rationals.

Small LPs only (a few hundred rows). Bland's rule is used for both the
entering and leaving choice, so the method terminates on degenerate
problems and the optimal vertex returned is a deterministic function of the
input ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None
    value: Fraction | None


def _frac_rows(rows):
    return [[Fraction(v) for v in row] for row in rows]


class _Tableau:
    def __init__(self, rows, basis):
        self.rows = rows  # constraint rows, last entry is the rhs
        self.basis = basis
        self.obj = None

    def pivot(self, r, c):
        row = self.rows[r]
        p = row[c]
        if p != 1:
            row[:] = [v / p for v in row]
        nz = [(j, v) for j, v in enumerate(row) if v]
        for i, other in enumerate(self.rows):
            if i != r and other[c]:
                f = other[c]
                for j, v in nz:
                    other[j] -= f * v
        f = self.obj[c]
        if f:
            for j, v in nz:
                self.obj[j] -= f * v
        self.basis[r] = c

    def set_objective(self, costs):
        """Install ``maximize costs . x`` as the reduced-cost row."""
        self.obj = [-Fraction(v) for v in costs] + [Fraction(0)]
        for r, b in enumerate(self.basis):
            f = self.obj[b]
            if f:
                row = self.rows[r]
                for j, v in enumerate(row):
                    if v:
                        self.obj[j] -= f * v

    def optimize(self, allowed):
        while True:
            c = next((j for j in allowed if self.obj[j] < 0), None)
            if c is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                if row[c] > 0:
                    ratio = row[-1] / row[c]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], c)


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_ge: Sequence[Sequence] = (),
    b_ge: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Optimise ``c . x`` subject to ``A_ub x <= b_ub``, ``A_ge x >= b_ge``, ``x >= 0``.

    Coefficients may be ints, floats or Fractions; arithmetic is exact.
    """
    nv = len(c)
    le, ge = [], []
    for row, b in zip(_frac_rows(A_ub), b_ub):
        b = Fraction(b)
        if b >= 0:
            le.append((row, b))
        else:
            ge.append(([-v for v in row], -b))
    for row, b in zip(_frac_rows(A_ge), b_ge):
        b = Fraction(b)
        if b > 0:
            ge.append((row, b))
        else:
            le.append(([-v for v in row], -b))
    for row, _ in le + ge:
        if len(row) != nv:
            raise ValueError("constraint row length does not match objective")

    m_le, m_ge = len(le), len(ge)
    # columns: x | slack (le) | surplus (ge) | artificial (ge) | rhs
    s0, u0, a0 = nv, nv + m_le, nv + m_le + m_ge
    width = a0 + m_ge + 1
    zero = Fraction(0)
    rows, basis = [], []
    for k, (row, b) in enumerate(le):
        full = row + [zero] * (width - nv)
        full[s0 + k] = Fraction(1)
        full[-1] = b
        rows.append(full)
        basis.append(s0 + k)
    for k, (row, b) in enumerate(ge):
        full = row + [zero] * (width - nv)
        full[u0 + k] = Fraction(-1)
        full[a0 + k] = Fraction(1)
        full[-1] = b
        rows.append(full)
        basis.append(a0 + k)

    tab = _Tableau(rows, basis)
    if m_ge:
        tab.set_objective([0] * a0 + [-1] * m_ge)
        tab.optimize(range(a0 + m_ge))
        if tab.obj[-1] != 0:
            return LPResult(INFEASIBLE, None, None)
        # drive zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= a0:
                c_in = next((j for j in range(a0) if tab.rows[r][j]), None)
                if c_in is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, c_in)
            r += 1
        for row in tab.rows:
            del row[a0:a0 + m_ge]

    sign = 1 if maximize else -1
    tab.set_objective([sign * Fraction(v) for v in c] + [0] * (m_le + m_ge))
    status = tab.optimize(range(a0))
    if status != OPTIMAL:
        return LPResult(status, None, None)
    x = [Fraction(0)] * nv
    for r, b in enumerate(tab.basis):
        if b < nv:
            x[b] = tab.rows[r][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, tuple(x), value)
