"""Exact rational feasibility for linear systems with a Farkas certificate.

Decides whether ``A_eq x = b_eq, A_ub x <= b_ub, x >= 0`` has a solution using
a phase-one simplex over ``fractions.Fraction`` with Bland's rule.  When it
does not, the optimal phase-one duals give multipliers ``y`` (free on
equalities, nonnegative on inequalities) with ``y^T A >= 0`` and ``y^T b < 0``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

Matrix = Sequence[Sequence[object]]


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    x: tuple[Fraction, ...] | None = None
    y_eq: tuple[Fraction, ...] | None = None
    y_ub: tuple[Fraction, ...] | None = None


def solve(A_eq: Matrix, b_eq, A_ub: Matrix, b_ub, nvars: int) -> Feasibility:
    m_eq, m_ub = len(A_eq), len(A_ub)
    m = m_eq + m_ub
    n = nvars + m_ub  # structural columns then slacks
    ncols = n + m  # then one artificial per row
    T: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    sign: list[int] = []
    for i in range(m):
        if i < m_eq:
            row = [Fraction(a) for a in A_eq[i]] + [Fraction(0)] * m_ub
            b = Fraction(b_eq[i])
        else:
            row = [Fraction(a) for a in A_ub[i - m_eq]] + [Fraction(0)] * m_ub
            row[nvars + i - m_eq] = Fraction(1)
            b = Fraction(b_ub[i - m_eq])
        s = -1 if b < 0 else 1
        row = [s * a for a in row]
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art)
        rhs.append(s * b)
        sign.append(s)
    basis = [n + i for i in range(m)]
    rc = [-sum((T[i][j] for i in range(m)), Fraction(0)) for j in range(n)] + [Fraction(0)] * m

    while True:
        enter = next((j for j in range(ncols) if rc[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                key = (rhs[i] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # phase one is bounded below by zero
            raise AssertionError("unbounded phase-one problem")
        r = best[1]
        piv = T[r][enter]
        T[r] = [a / piv for a in T[r]]
        rhs[r] /= piv
        for i in range(m):
            f = T[i][enter]
            if i != r and f:
                Ti, Tr = T[i], T[r]
                T[i] = [a - f * b for a, b in zip(Ti, Tr)]
                rhs[i] -= f * rhs[r]
        f = rc[enter]
        rc = [a - f * b for a, b in zip(rc, T[r])]
        basis[r] = enter

    residual = sum((rhs[i] for i in range(m) if basis[i] >= n), Fraction(0))
    if residual == 0:
        x = [Fraction(0)] * n
        for i, j in enumerate(basis):
            if j < n:
                x[j] = rhs[i]
        return Feasibility(True, x=tuple(x[:nvars]))
    # phase-one duals are 1 - rc on artificial columns; negate and undo row flips
    y = [-(1 - rc[n + i]) * sign[i] for i in range(m)]
    return Feasibility(False, y_eq=tuple(y[:m_eq]), y_ub=tuple(y[m_eq:]))


def check_solution(A_eq: Matrix, b_eq, A_ub: Matrix, b_ub, x) -> bool:
    if any(v < 0 for v in x):
        return False
    for row, b in zip(A_eq, b_eq):
        if sum(Fraction(a) * v for a, v in zip(row, x)) != b:
            return False
    for row, b in zip(A_ub, b_ub):
        if sum(Fraction(a) * v for a, v in zip(row, x)) > b:
            return False
    return True


def check_certificate(A_eq: Matrix, b_eq, A_ub: Matrix, b_ub, y_eq, y_ub, nvars: int) -> bool:
    """True iff (y_eq, y_ub) proves infeasibility: y_ub >= 0, y^T A >= 0, y^T b < 0."""
    if any(y < 0 for y in y_ub):
        return False
    for j in range(nvars):
        col = sum(Fraction(row[j]) * y for row, y in zip(A_eq, y_eq))
        col += sum(Fraction(row[j]) * y for row, y in zip(A_ub, y_ub))
        if col < 0:
            return False
    total = sum(Fraction(b) * y for b, y in zip(b_eq, y_eq)) + sum(Fraction(b) * y for b, y in zip(b_ub, y_ub))
    return total < 0
