# SPDX-FileCopyrightText: Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Exact two-phase primal simplex over the rationals with Bland's rule.

Usage:
    lp = LinearProgram(objective=[1, 1], A=[[1, 1]], rhs=[1], senses=["<="])
    result = solve(lp)   # LPResult(status="optimal", x=(1, 0), value=1)
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import rational as rq
from .errors import DimensionMismatch

__all__ = ["LE", "EQ", "GE", "OPTIMAL", "INFEASIBLE", "UNBOUNDED", "LinearProgram", "LPResult", "solve", "feasible_point"]

logger = logging.getLogger(__name__)

LE, EQ, GE = "<=", "==", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """
    maximize <objective, x> subject to A x (senses) rhs.

    lower_bounds holds 0 (x_j >= 0) or None (x_j free) per variable; it
    defaults to all zeros.
    """
    objective: rq.Vector
    A: rq.Matrix
    rhs: rq.Vector
    senses: Tuple[str, ...]
    lower_bounds: Tuple[Optional[int], ...] = None

    def __init__(self, objective, A, rhs, senses=None, lower_bounds=None):
        objective = rq.vector(objective)
        A = rq.matrix(A)
        rhs = rq.vector(rhs)
        senses = tuple(senses) if senses is not None else tuple(LE for _ in rhs)
        lower_bounds = tuple(lower_bounds) if lower_bounds is not None else tuple(0 for _ in objective)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "lower_bounds", lower_bounds)
        self._check()

    def _check(self):
        n = len(self.objective)
        if n == 0:
            raise DimensionMismatch("a linear program needs at least one variable")
        if len(self.A) != len(self.rhs) or len(self.senses) != len(self.rhs):
            raise DimensionMismatch("constraint rows, rhs and senses have different lengths")
        if any(len(row) != n for row in self.A):
            raise DimensionMismatch("constraint row length differs from the number of variables")
        if len(self.lower_bounds) != n:
            raise DimensionMismatch("one lower bound per variable is required")
        if any(s not in (LE, EQ, GE) for s in self.senses):
            raise DimensionMismatch(f"unknown row sense in {self.senses}")
        if any(lb not in (0, None) for lb in self.lower_bounds):
            raise DimensionMismatch("lower bounds must be 0 or None")

    @property
    def num_variables(self) -> int:
        return len(self.objective)

    def satisfied_by(self, x: Sequence) -> bool:
        """Exact feasibility check."""
        if any(lb == 0 and xj < 0 for lb, xj in zip(self.lower_bounds, x)):
            return False
        for row, sense, b in zip(self.A, self.senses, self.rhs):
            lhs = rq.dot(row, x)
            if (sense == LE and lhs > b) or (sense == GE and lhs < b) or (sense == EQ and lhs != b):
                return False
        return True


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[rq.Vector] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """
    Dense tableau for min f.x s.t. T x = b, x >= 0 with b >= 0.

    rows[i] = [T_i | b_i]; cost holds reduced costs and, in its last entry,
    minus the current objective value.
    """

    def __init__(self, rows: List[List[Fraction]], basis: List[int]):
        self.rows = rows
        self.basis = basis
        self.cost: List[Fraction] = []

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) - 1 if self.rows else 0

    def set_cost(self, f: Sequence[Fraction]):
        """Install objective f (minimized) and price out the basic columns."""
        cost = list(f) + [Fraction(0)]
        for i, b in enumerate(self.basis):
            fb = cost[b]
            if fb != 0:
                cost = [c - fb * r for c, r in zip(cost, self.rows[i])]
        self.cost = cost

    def pivot(self, i: int, j: int):
        p = self.rows[i][j]
        self.rows[i] = [a / p for a in self.rows[i]]
        pivot_row = self.rows[i]
        for k in range(len(self.rows)):
            if k != i and self.rows[k][j] != 0:
                f = self.rows[k][j]
                self.rows[k] = [a - f * b for a, b in zip(self.rows[k], pivot_row)]
        if self.cost[j] != 0:
            f = self.cost[j]
            self.cost = [a - f * b for a, b in zip(self.cost, pivot_row)]
        self.basis[i] = j

    def bland(self, allowed: Sequence[bool]) -> str:
        """Run primal simplex with Bland's rule until optimal or unbounded."""
        pivots = 0
        while True:
            entering = next((j for j in range(self.ncols) if allowed[j] and self.cost[j] < 0), None)
            if entering is None:
                logger.debug(f"simplex optimal after {pivots} pivots")
                return OPTIMAL
            leaving = None
            best = None
            for i, row in enumerate(self.rows):
                if row[entering] > 0:
                    key = (row[-1] / row[entering], self.basis[i])
                    if best is None or key < best:
                        best, leaving = key, i
            if leaving is None:
                return UNBOUNDED
            self.pivot(leaving, entering)
            pivots += 1

    def solution(self) -> List[Fraction]:
        x = [Fraction(0)] * self.ncols
        for i, b in enumerate(self.basis):
            x[b] = self.rows[i][-1]
        return x


def _standard_form(lp: LinearProgram):
    """
    Rewrite lp as min f.x, T x = b, x >= 0, b >= 0.

    Returns:
        (rows, f, width, recover): rows are [T_i | b_i] over width columns;
        recover maps a standard form solution back to the original variables.
    """
    n = lp.num_variables
    # free variables split into positive and negative parts
    columns = []
    for j, lb in enumerate(lp.lower_bounds):
        columns.append((j, 1))
        if lb is None:
            columns.append((j, -1))
    num_slacks = sum(1 for s in lp.senses if s != EQ)
    width = len(columns) + num_slacks

    rows = []
    slack = len(columns)
    for row, sense, b in zip(lp.A, lp.senses, lp.rhs):
        t = [row[j] * sign for j, sign in columns] + [Fraction(0)] * num_slacks
        if sense == LE:
            t[slack] = Fraction(1)
            slack += 1
        elif sense == GE:
            t[slack] = Fraction(-1)
            slack += 1
        if b < 0:
            t = [-a for a in t]
            b = -b
        rows.append(t + [b])

    f = [-lp.objective[j] * sign for j, sign in columns] + [Fraction(0)] * num_slacks

    def recover(x):
        out = [Fraction(0)] * n
        for (j, sign), value in zip(columns, x):
            out[j] += sign * value
        return tuple(out)

    return rows, f, width, recover


def solve(lp: LinearProgram) -> LPResult:
    """
    Solve lp exactly.

    Phase one minimizes the sum of artificial variables; phase two maximizes the
    objective. Bland's rule makes both phases finite and deterministic, and the
    returned point is a vertex satisfying every constraint exactly.

    Returns:
        LPResult with status "optimal" (x, value), "infeasible" or "unbounded".
    """
    rows, f, width, recover = _standard_form(lp)
    m = len(rows)
    if m == 0:
        # no constraints: optimal at 0 unless some improving direction exists
        if any(fj < 0 for fj in f):
            return LPResult(status=UNBOUNDED)
        return LPResult(status=OPTIMAL, x=recover([Fraction(0)] * width), value=Fraction(0))

    # phase one with one artificial per row
    for i, r in enumerate(rows):
        b = r.pop()
        r.extend(Fraction(1) if k == i else Fraction(0) for k in range(m))
        r.append(b)
    tableau = _Tableau(rows, basis=[width + i for i in range(m)])
    tableau.set_cost([Fraction(0)] * width + [Fraction(1)] * m)
    tableau.bland([True] * (width + m))
    if tableau.cost[-1] != 0:
        logger.debug("linear program is infeasible")
        return LPResult(status=INFEASIBLE)

    # drive zero-valued artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tableau.rows):
        if tableau.basis[i] >= width:
            j = next((j for j in range(width) if tableau.rows[i][j] != 0), None)
            if j is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, j)
        i += 1
    tableau.rows = [r[:width] + [r[-1]] for r in tableau.rows]

    if not tableau.rows:
        if any(fj < 0 for fj in f):
            return LPResult(status=UNBOUNDED)
        x = recover([Fraction(0)] * width)
        return LPResult(status=OPTIMAL, x=x, value=rq.dot(lp.objective, x))

    tableau.set_cost(f)
    status = tableau.bland([True] * width)
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED)
    x = recover(tableau.solution())
    return LPResult(status=OPTIMAL, x=x, value=rq.dot(lp.objective, x))


def feasible_point(A_eq=(), b_eq=(), A_le=(), b_le=(), n=None) -> Optional[rq.Vector]:
    """A vertex of {x >= 0 : A_eq x = b_eq, A_le x <= b_le}, or None if empty."""
    rows = list(A_eq) + list(A_le)
    if n is None:
        n = len(rows[0])
    lp = LinearProgram(
        objective=[0] * n,
        A=rows,
        rhs=list(b_eq) + list(b_le),
        senses=[EQ] * len(A_eq) + [LE] * len(A_le),
    )
    result = solve(lp)
    return result.x if result.optimal else None
