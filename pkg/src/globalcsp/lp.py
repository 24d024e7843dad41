"""Exact rational simplex for small packing LPs.

Solves ``max c·x  s.t.  A x <= b, x >= 0`` with ``b >= 0`` so the slack basis
is feasible from the start. Bland's rule prevents cycling. The final
objective row also yields an optimal dual, which callers use as a
certificate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class Unbounded(Exception):
    pass


@dataclass
class LpResult:
    value: Fraction
    primal: list
    dual: list
    pivots: int


def simplex_max(A, b, c) -> LpResult:
    m, n = len(A), len(c)
    if any(len(row) != n for row in A) or len(b) != m:
        raise ValueError("inconsistent LP dimensions")
    if any(bi < 0 for bi in b):
        raise ValueError("right-hand side must be nonnegative")
    width = n + m
    T = []
    for i in range(m):
        row = [Fraction(x) for x in A[i]] + [Fraction(int(i == k)) for k in range(m)]
        row.append(Fraction(b[i]))
        T.append(row)
    z = [-Fraction(x) for x in c] + [Fraction(0)] * m + [Fraction(0)]
    basis = list(range(n, n + m))
    pivots = 0
    while True:
        enter = next((j for j in range(width) if z[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            raise Unbounded("objective is unbounded")
        _pivot(T, z, leave, enter)
        basis[leave] = enter
        pivots += 1
    x = [Fraction(0)] * width
    for i, var in enumerate(basis):
        x[var] = T[i][-1]
    return LpResult(z[-1], x[:n], z[n:n + m], pivots)


def _pivot(T, z, r, col):
    piv = T[r][col]
    T[r] = [v / piv for v in T[r]]
    pr = T[r]
    for i, row in enumerate(T):
        if i != r and row[col] != 0:
            f = row[col]
            T[i] = [v - f * p for v, p in zip(row, pr)]
    if z[col] != 0:
        f = z[col]
        z[:] = [v - f * p for v, p in zip(z, pr)]
