"""
Exact linear programming over rationals.

Programs have equality constraints and non-negative variables:

    min (or max)  c^T x   subject to  A x = b,  x >= 0

and are solved with a two-phase tableau simplex in Fraction arithmetic,
using Bland's rule so degenerate pivots cannot cycle.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)


class LPStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class LinearProgram:
    A: Tuple[Tuple[Fraction, ...], ...]
    b: Tuple[Fraction, ...]
    c: Tuple[Fraction, ...]
    sense: str = "min"

    def __post_init__(self):
        A = tuple(tuple(Fraction(v) for v in row) for row in self.A)
        b = tuple(Fraction(v) for v in self.b)
        c = tuple(Fraction(v) for v in self.c)
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if len(b) != len(A):
            raise ValueError(f"{len(A)} constraint rows but {len(b)} right-hand sides")
        for i, row in enumerate(A):
            if len(row) != len(c):
                raise ValueError(
                    f"constraint row {i} has {len(row)} columns, expected {len(c)}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def m(self) -> int:
        return len(self.b)

    def with_sense(self, sense: str) -> "LinearProgram":
        return LinearProgram(self.A, self.b, self.c, sense)

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((ci * xi for ci, xi in zip(self.c, x)), Fraction(0))

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.n or any(v < 0 for v in x):
            return False
        return all(sum((a * v for a, v in zip(row, x)), Fraction(0)) == rhs
                   for row, rhs in zip(self.A, self.b))


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: Optional[Fraction] = None
    witness: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class _Tableau:
    """Rows [A | b] with a reduced-cost row [r | -z] and a basis."""

    def __init__(self, rows: List[List[Fraction]], basis: List[int]):
        self.rows = rows
        self.basis = basis
        self.cost: List[Fraction] = []
        self.pivots = 0

    def set_cost(self, c: Sequence[Fraction]) -> None:
        width = len(self.rows[0]) if self.rows else len(c) + 1
        cost = list(c) + [Fraction(0)] * (width - len(c))
        for row, var in zip(self.rows, self.basis):
            cb = cost[var]
            if cb:
                for j, v in enumerate(row):
                    if v:
                        cost[j] -= cb * v
        self.cost = cost

    def pivot(self, i: int, j: int) -> None:
        row = self.rows[i]
        p = row[j]
        if p != 1:
            row[:] = [v / p for v in row]
        nonzero = [k for k, v in enumerate(row) if v]
        for r, other in enumerate(self.rows):
            f = other[j]
            if r != i and f:
                for k in nonzero:
                    other[k] -= f * row[k]
        f = self.cost[j]
        if f:
            for k in nonzero:
                self.cost[k] -= f * row[k]
        self.basis[i] = j
        self.pivots += 1

    def run(self, columns: int) -> LPStatus:
        """Minimize over the first `columns` columns with Bland's rule."""
        while True:
            entering = next((j for j in range(columns) if self.cost[j] < 0), None)
            if entering is None:
                return LPStatus.OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return LPStatus.UNBOUNDED
            self.pivot(best[1], entering)

    @property
    def value(self) -> Fraction:
        return -self.cost[-1]


def solve(lp: LinearProgram) -> LPResult:
    """Exact optimum of the program, or the reason there is none."""
    n, m = lp.n, lp.m
    rows: List[List[Fraction]] = []
    for i, (row, rhs) in enumerate(zip(lp.A, lp.b)):
        sign = -1 if rhs < 0 else 1
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        rows.append([sign * v for v in row] + artificial + [sign * rhs])
    tableau = _Tableau(rows, [n + i for i in range(m)])

    # phase 1: minimize the sum of the artificial variables
    tableau.set_cost([Fraction(0)] * n + [Fraction(1)] * m)
    tableau.run(n + m)
    if tableau.value > 0:
        logger.debug(f"Infeasible after {tableau.pivots} phase-1 pivots")
        return LPResult(LPStatus.INFEASIBLE, pivots=tableau.pivots)

    # drive the remaining artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] < n:
            i += 1
            continue
        row = tableau.rows[i]
        j = next((j for j in range(n) if row[j]), None)
        if j is None:
            del tableau.rows[i]
            del tableau.basis[i]
            continue
        tableau.pivot(i, j)
        i += 1
    tableau.rows = [row[:n] + row[-1:] for row in tableau.rows]

    # phase 2
    c = [-v for v in lp.c] if lp.sense == "max" else list(lp.c)
    tableau.set_cost(c)
    status = tableau.run(n)
    if status is LPStatus.UNBOUNDED:
        return LPResult(status, pivots=tableau.pivots)

    x = [Fraction(0)] * n
    for row, var in zip(tableau.rows, tableau.basis):
        x[var] = row[-1]
    value = tableau.value
    if lp.sense == "max":
        value = -value
    logger.debug(f"Solved {m}x{n} program ({lp.sense}) in {tableau.pivots} pivots: {value}")
    return LPResult(LPStatus.OPTIMAL, value, tuple(x), tableau.pivots)
