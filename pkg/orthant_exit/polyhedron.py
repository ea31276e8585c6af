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
Exact algorithms on polyhedra P = {x >= 0 : sum_i x_i C_i = b}.

A point is minimal when no other point of P lies below it coordinatewise,
which happens iff its active columns are positively independent. Minimal
points are convex combinations of vertices, and their 1-norm is bounded by
M * |b|_1 with M depending on the columns only.

The extended form {x >= 0 : L x = b, phi(x) >= c} is handled through a
standard polyhedron with one extra variable x_{n+1} = phi(x) - c.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from . import lp
from . import rational as rq
from .errors import DimensionMismatch, NotInEP, NotInP, NotMinimal, TooLarge

__all__ = [
    "MAX_ENUMERATION_COLUMNS", "StandardPolyhedron", "ExtendedPolyhedron",
    "active_set", "is_vertex", "positive_dependence", "is_minimal", "reduce_to_minimal",
    "decompose_minimal", "bound_M", "enumerate_vertices", "lift", "extended_bound", "extended_reduce",
]

logger = logging.getLogger(__name__)

MAX_ENUMERATION_COLUMNS = 16


@dataclass(frozen=True)
class StandardPolyhedron:
    """{x in R^n_+ : sum_i x_i C_i = b} with columns C_1..C_n in Q^m."""
    columns: rq.Matrix
    b: rq.Vector

    def __post_init__(self):
        object.__setattr__(self, "columns", rq.matrix(self.columns))
        object.__setattr__(self, "b", rq.vector(self.b))
        if not self.columns:
            raise DimensionMismatch("a polyhedron needs at least one column")
        if any(len(c) != len(self.b) for c in self.columns):
            raise DimensionMismatch(f"columns must have the dimension of b ({len(self.b)})")
        if not 1 <= self.m <= self.n:
            raise DimensionMismatch(f"need 1 <= m <= n, got m = {self.m}, n = {self.n}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], b: Sequence):
        return cls(columns=rq.transpose(rq.matrix(rows)), b=b)

    @property
    def m(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def rows(self) -> rq.Matrix:
        return rq.transpose(self.columns)

    def image(self, x: Sequence) -> rq.Vector:
        total = [Fraction(0)] * self.m
        for xi, column in zip(x, self.columns):
            if xi:
                for k, c in enumerate(column):
                    total[k] += xi * c
        return tuple(total)

    def contains(self, x: Sequence) -> bool:
        x = rq.vector(x)
        if len(x) != self.n:
            raise DimensionMismatch(f"point of length {len(x)} for a polyhedron with {self.n} columns")
        return all(c >= 0 for c in x) and self.image(x) == self.b

    def to_json(self) -> dict:
        return {"columns": [rq.format_vector(c) for c in self.columns], "b": rq.format_vector(self.b)}


@dataclass(frozen=True)
class ExtendedPolyhedron:
    """{x in R^n_+ : L x = b, <phi, x> >= c} with L an n x n matrix given by rows."""
    L: rq.Matrix
    phi: rq.Vector
    b: rq.Vector
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "L", rq.matrix(self.L))
        object.__setattr__(self, "phi", rq.vector(self.phi))
        object.__setattr__(self, "b", rq.vector(self.b))
        object.__setattr__(self, "c", rq.to_fraction(self.c))
        n = len(self.phi)
        if n == 0:
            raise DimensionMismatch("phi must have at least one coefficient")
        if len(self.L) != n or any(len(r) != n for r in self.L) or len(self.b) != n:
            raise DimensionMismatch(f"L must be {n} x {n} and b must have length {n}")

    @property
    def n(self) -> int:
        return len(self.phi)

    def contains(self, x: Sequence) -> bool:
        x = rq.vector(x)
        if len(x) != self.n:
            raise DimensionMismatch(f"point of length {len(x)} for an extended polyhedron in dimension {self.n}")
        if any(c < 0 for c in x):
            return False
        return all(rq.dot(r, x) == bi for r, bi in zip(self.L, self.b)) and rq.dot(self.phi, x) >= self.c


def _require_member(P: StandardPolyhedron, x: Sequence) -> rq.Vector:
    x = rq.vector(x)
    if not P.contains(x):
        raise NotInP(f"{rq.format_vector(x)} is not in the polyhedron")
    return x


def active_set(P: StandardPolyhedron, x: Sequence) -> Tuple[int, ...]:
    """I(x) = {i : x_i > 0}, 0-based."""
    x = _require_member(P, x)
    return tuple(i for i, xi in enumerate(x) if xi > 0)


def _independent(P: StandardPolyhedron, indices: Sequence[int]) -> bool:
    return rq.rank([P.columns[i] for i in indices]) == len(indices)


def is_vertex(P: StandardPolyhedron, x: Sequence) -> bool:
    """x is a vertex iff its active columns are linearly independent. 0 is a vertex iff b = 0."""
    return _independent(P, active_set(P, x))


def positive_dependence(P: StandardPolyhedron, indices: Sequence[int]):
    """
    A vertex of {u >= 0 on indices : sum u_i C_i = 0, sum u_i = 1}, embedded
    in R^n, or None when the columns are positively independent.
    """
    indices = list(indices)
    if not indices:
        return None
    rows = [[P.columns[i][k] for i in indices] for k in range(P.m)] + [[1] * len(indices)]
    rhs = [0] * P.m + [1]
    u = lp.feasible_point(A_eq=rows, b_eq=rhs, n=len(indices))
    if u is None:
        return None
    full = [Fraction(0)] * P.n
    for i, ui in zip(indices, u):
        full[i] = ui
    return tuple(full)


def is_minimal(P: StandardPolyhedron, x: Sequence) -> bool:
    return positive_dependence(P, active_set(P, x)) is None


def reduce_to_minimal(P: StandardPolyhedron, x: Sequence) -> rq.Vector:
    """
    Walk down from x to a minimal point y <= x of P.

    Each step subtracts t0 * u, where u is a positive dependence of the active
    columns and t0 = min x_i / u_i over u_i > 0. At least one active coordinate
    drops to zero per step, so there are at most |I(x)| steps.
    """
    y = list(_require_member(P, x))
    steps = 0
    while True:
        u = positive_dependence(P, [i for i, yi in enumerate(y) if yi > 0])
        if u is None:
            break
        t0 = min(yi / ui for yi, ui in zip(y, u) if ui > 0)
        y = [yi - t0 * ui for yi, ui in zip(y, u)]
        steps += 1
    logger.debug(f"reduced to a minimal point in {steps} steps")
    return tuple(y)


def _decompose(P: StandardPolyhedron, y: rq.Vector, weight: Fraction, out: Dict[rq.Vector, Fraction]):
    active = [i for i, yi in enumerate(y) if yi > 0]
    kernel = rq.nullspace([[P.columns[i][k] for i in active] for k in range(P.m)], len(active))
    if not kernel:
        out[y] = out.get(y, Fraction(0)) + weight
        return
    u = [Fraction(0)] * P.n
    for i, ui in zip(active, kernel[0]):
        u[i] = ui
    # a positively independent active set forces both signs in u
    t_plus = min(y[i] / -u[i] for i in active if u[i] < 0)
    t_minus = min(y[i] / u[i] for i in active if u[i] > 0)
    x_plus = tuple(yi + t_plus * ui for yi, ui in zip(y, u))
    x_minus = tuple(yi - t_minus * ui for yi, ui in zip(y, u))
    total = t_plus + t_minus
    _decompose(P, x_minus, weight * t_plus / total, out)
    _decompose(P, x_plus, weight * t_minus / total, out)


def decompose_minimal(P: StandardPolyhedron, y: Sequence) -> List[Tuple[rq.Vector, Fraction]]:
    """
    Write a minimal point as a convex combination of vertices.

    Returns:
        [(vertex, weight)] sorted by vertex, weights positive and summing to 1
        exactly, with sum weight * vertex = y.

    Raises:
        NotInP: y is not in P.
        NotMinimal: y is not minimal.
    """
    y = _require_member(P, y)
    if not is_minimal(P, y):
        raise NotMinimal(f"{rq.format_vector(y)} is not a minimal point")
    out: Dict[rq.Vector, Fraction] = {}
    _decompose(P, y, Fraction(1), out)
    return sorted(out.items())


def _independent_subsets(P: StandardPolyhedron):
    if P.n > MAX_ENUMERATION_COLUMNS:
        raise TooLarge(f"{P.n} columns exceed the enumeration cap of {MAX_ENUMERATION_COLUMNS}")
    for size in range(1, P.m + 1):
        for subset in itertools.combinations(range(P.n), size):
            if _independent(P, subset):
                yield subset


def _inverse_norm(P: StandardPolyhedron, subset: Sequence[int]) -> Fraction:
    """1-norm of the left inverse of C_S on its image, through k independent rows of C_S."""
    block = [[P.columns[i][k] for i in subset] for k in range(P.m)]
    _, pivot_rows = rq.rref(rq.transpose(block), P.m)
    square = [block[k] for k in pivot_rows]
    inverse = rq.inverse(square)
    return max(sum(abs(inverse[r][c]) for r in range(len(subset))) for c in range(len(subset)))


def bound_M(P: StandardPolyhedron) -> Fraction:
    """
    M = max over linearly independent column subsets S of |C_S^{-1}|_1.

    Every minimal point y of P satisfies |y|_1 <= M |b|_1.

    Raises:
        TooLarge: more than MAX_ENUMERATION_COLUMNS columns.
    """
    norms = [_inverse_norm(P, s) for s in _independent_subsets(P)]
    return max(norms, default=Fraction(0))


def enumerate_vertices(P: StandardPolyhedron) -> List[rq.Vector]:
    """All vertices, sorted. Solves C_S x_S = b for every independent subset S and keeps x >= 0."""
    vertices = set()
    if rq.is_zero(P.b):
        vertices.add(tuple(Fraction(0) for _ in range(P.n)))
    for subset in _independent_subsets(P):
        block = [[P.columns[i][k] for i in subset] for k in range(P.m)]
        x_s = rq.solve(block, P.b)
        if x_s is None or any(v < 0 for v in x_s):
            continue
        x = [Fraction(0)] * P.n
        for i, v in zip(subset, x_s):
            x[i] = v
        vertices.add(tuple(x))
    logger.debug(f"{len(vertices)} vertices among {P.n} columns")
    return sorted(vertices)


def lift(EP: ExtendedPolyhedron) -> StandardPolyhedron:
    """Standard polyhedron in n + 1 variables with the extra row <phi, x> - x_{n+1} = c."""
    rows = [list(r) + [Fraction(0)] for r in EP.L] + [list(EP.phi) + [Fraction(-1)]]
    return StandardPolyhedron.from_rows(rows, list(EP.b) + [EP.c])


def extended_bound(EP: ExtendedPolyhedron) -> Fraction:
    """M' of the lifted polyhedron; reduced points satisfy |y|_1 <= M' (|b|_1 + |c|)."""
    return bound_M(lift(EP))


def extended_reduce(EP: ExtendedPolyhedron, x: Sequence) -> rq.Vector:
    """
    Minimal point y <= x of the extended polyhedron.

    Raises:
        NotInEP: x is not in EP.
    """
    x = rq.vector(x)
    if not EP.contains(x):
        raise NotInEP(f"{rq.format_vector(x)} is not in the extended polyhedron")
    lifted = lift(EP)
    y = reduce_to_minimal(lifted, list(x) + [rq.dot(EP.phi, x) - EP.c])
    return y[:EP.n]
