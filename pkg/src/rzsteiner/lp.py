"""A small exact simplex for covering LPs.

Solves ``min c.x  s.t.  A x >= b, x >= 0`` with nonnegative integer ``A``,
integer ``b`` and nonnegative rational ``c`` by running the primal simplex
on the packing dual ``max b.y  s.t.  A^T y <= c, y >= 0``, whose slack basis
is feasible from the start.  The tableau is kept in integers with the
fraction-free pivot rule (every entry is a minor of the scaled input, and
each update divides exactly by the previous pivot), and Bland's rule keeps
it from cycling.  The primal ``x`` is read off the reduced costs of the
slack columns.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


class LpError(RuntimeError):
    pass


class UnboundedError(LpError):
    """The packing dual is unbounded, so the covering LP is infeasible."""


@dataclass(frozen=True)
class LpSolution:
    value: Fraction
    x: tuple[Fraction, ...]          # primal (covering) point
    y: dict[int, Fraction]           # nonzero dual weights, by row index
    pivots: int


def _lcm_denominator(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def solve_covering(rows: Sequence[Sequence[int]], rhs: Sequence[int], costs: Sequence) -> LpSolution:
    """Exact optimum of ``min costs.x  s.t.  rows x >= rhs, x >= 0``."""
    m = len(rows)
    n = len(costs)
    costs = [Fraction(c) for c in costs]
    if any(c < 0 for c in costs):
        raise LpError("costs must be nonnegative")
    scale = _lcm_denominator(costs)
    cint = [int(c * scale) for c in costs]
    # dual tableau: one row per covering variable, columns = y (m), slacks (n), rhs
    width = m + n + 1
    T = np.zeros((n + 1, width), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise LpError(f"row {i} has {len(row)} coefficients, expected {n}")
        for j, a in enumerate(row):
            if a < 0 or a != int(a):
                raise LpError("coefficients must be nonnegative integers")
            T[j, i] = int(a)
    for j in range(n):
        T[j, m + j] = 1
        T[j, -1] = cint[j]
    for i, b in enumerate(rhs):
        T[n, i] = -int(b)
    T[n, m:] = 0
    basis = [m + j for j in range(n)]
    d = 1
    pivots = 0
    while True:
        obj = T[n]
        entering = next((j for j in range(m + n) if obj[j] < 0), None)
        if entering is None:
            break
        col = T[:n, entering]
        leave = None
        for i in range(n):
            a = col[i]
            if a > 0:
                if leave is None:
                    leave = i
                    continue
                # compare T[i,-1]/a with T[leave,-1]/col[leave]
                lhs = T[i, -1] * col[leave]
                rhs_ = T[leave, -1] * a
                if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[leave]):
                    leave = i
        if leave is None:
            raise UnboundedError("covering LP is infeasible")
        p = T[leave, entering]
        prow = T[leave].copy()
        factor = T[:, entering].copy()
        T = (T * p - np.outer(factor, prow)) // d
        T[leave] = prow
        basis[leave] = entering
        d = p
        pivots += 1
    value = Fraction(int(T[n, -1]), d * scale)
    x = tuple(Fraction(int(T[n, m + j]), d) for j in range(n))
    y = {}
    for i, v in enumerate(basis):
        if v < m and T[i, -1] != 0:
            y[v] = Fraction(int(T[i, -1]), d * scale)
    sol = LpSolution(value, x, y, pivots)
    check_certificate(rows, rhs, costs, sol)
    return sol


def check_certificate(rows, rhs, costs, sol: LpSolution) -> None:
    """Raise LpError unless ``sol`` is primal and dual feasible with equal values."""
    x, y = sol.x, sol.y
    if any(v < 0 for v in x) or any(v < 0 for v in y.values()):
        raise LpError("negative coordinate in certificate")
    # integer arithmetic on the scaled points: X * x and Y * y are integral
    X = _lcm_denominator(x)
    xi = [int(v * X) for v in x]
    for i, row in enumerate(rows):
        if sum(a * v for a, v in zip(row, xi) if a) < rhs[i] * X:
            raise LpError(f"primal point violates row {i}")
    Y = _lcm_denominator(y.values())
    yi = {i: int(w * Y) for i, w in y.items()}
    for j, c in enumerate(costs):
        if sum(rows[i][j] * w for i, w in yi.items()) > Fraction(c) * Y:
            raise LpError(f"dual point violates column {j}")
    primal = sum((Fraction(c) * v for c, v in zip(costs, x) if v), Fraction(0))
    dual = Fraction(sum(rhs[i] * w for i, w in yi.items()), Y)
    if not primal == dual == sol.value:
        raise LpError(f"objective mismatch: primal {primal}, dual {dual}, reported {sol.value}")
