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

"""Exact linear algebra over the rationals.

Vectors are tuples of ``Fraction`` and matrices are tuples of row vectors.
Everything here is deterministic: elimination always picks the first nonzero
pivot in index order.
"""

import math
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence, Tuple

from .errors import DimensionMismatch, ParseError

__all__ = [
    "Vector", "Matrix", "MAX_FLOAT_DENOMINATOR",
    "to_fraction", "vector", "matrix", "format_fraction", "format_vector",
    "dot", "add", "sub", "scale", "norm1", "is_zero",
    "transpose", "rref", "rank", "nullspace", "solve", "inverse", "in_span",
    "orthogonal_complement", "unit",
]

Vector = Tuple[Fraction, ...]
Matrix = Tuple[Vector, ...]

MAX_FLOAT_DENOMINATOR = 10**9


def to_fraction(value) -> Fraction:
    """
    Convert a user supplied scalar to an exact rational.

    Args:
        value (str | int | float | Fraction): "p/q" strings, decimal strings and
            integers are parsed exactly. Floats are accepted only when they are
            exactly a rational with denominator at most 10^9 (0.2 -> 1/5).

    Returns:
        Fraction
    """
    if isinstance(value, bool):
        raise ParseError(f"booleans are not numbers: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(f"not a rational number: {value!r}") from e
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ParseError(f"not a finite number: {value!r}")
        candidate = Fraction(value).limit_denominator(MAX_FLOAT_DENOMINATOR)
        if float(candidate) != value:
            raise ParseError(f"{value!r} is not a rational with denominator <= {MAX_FLOAT_DENOMINATOR}")
        return candidate
    raise ParseError(f"unsupported scalar type {type(value).__name__}")


def vector(values) -> Vector:
    return tuple(to_fraction(v) for v in values)


def matrix(rows) -> Matrix:
    rows = tuple(vector(r) for r in rows)
    if rows and len({len(r) for r in rows}) != 1:
        raise DimensionMismatch("matrix rows have different lengths")
    return rows


def format_fraction(value: Fraction) -> str:
    """'p/q', or 'n' for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_vector(values) -> list:
    return [format_fraction(v) for v in values]


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"dot of vectors of length {len(u)} and {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(t, u: Sequence) -> Vector:
    return tuple(t * a for a in u)


def norm1(u: Sequence):
    return sum((abs(a) for a in u), Fraction(0))


def is_zero(u: Sequence) -> bool:
    return all(a == 0 for a in u)


def unit(i: int, d: int) -> Vector:
    return tuple(Fraction(1) if j == i else Fraction(0) for j in range(d))


def transpose(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    if not rows:
        return tuple(() for _ in range(ncols or 0))
    return tuple(tuple(Fraction(r[j]) for r in rows) for j in range(len(rows[0])))


def rref(rows: Sequence[Sequence], ncols: Optional[int] = None):
    """
    Reduced row echelon form by Gauss-Jordan elimination.

    Args:
        rows: matrix as a sequence of rows.
        ncols (int): number of columns, needed only when rows is empty.

    Returns:
        (reduced_rows, pivots): the nonzero rows of the RREF and the pivot
        column of each of them.
    """
    work = [[Fraction(a) for a in r] for r in rows]
    ncols = len(work[0]) if work else (ncols or 0)
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= len(work):
            break
        pivot = next((i for i in range(row, len(work)) if work[i][col] != 0), None)
        if pivot is None:
            continue
        work[row], work[pivot] = work[pivot], work[row]
        p = work[row][col]
        work[row] = [a / p for a in work[row]]
        for i in range(len(work)):
            if i != row and work[i][col] != 0:
                f = work[i][col]
                work[i] = [a - f * b for a, b in zip(work[i], work[row])]
        pivots.append(col)
        row += 1
    return tuple(tuple(r) for r in work[:row]), tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: Optional[int] = None) -> Matrix:
    """Basis of {x : A x = 0}, one vector per free column, in column order."""
    reduced, pivots = rref(rows, ncols)
    ncols = len(rows[0]) if rows else (ncols or 0)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in zip(reduced, pivots):
            x[p] = -r[f]
        basis.append(tuple(x))
    return tuple(basis)


def orthogonal_complement(basis: Sequence[Sequence], dimension: int) -> Matrix:
    """Rational basis of the orthogonal complement of span(basis) in Q^dimension."""
    return nullspace(basis, dimension)


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    if is_zero(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [v]) == rank(basis)


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[Vector]:
    """
    Solve A x = b for A with linearly independent columns.

    Returns:
        The unique solution, or None when the system is inconsistent.
    """
    if len(a) != len(b):
        raise DimensionMismatch("right-hand side length differs from row count")
    ncols = len(a[0]) if a else 0
    augmented = [list(r) + [bi] for r, bi in zip(a, b)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        raise DimensionMismatch("columns are linearly dependent")
    x = [Fraction(0)] * ncols
    for r, p in zip(reduced, pivots):
        x[p] = r[-1]
    return tuple(x)


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    if any(len(r) != n for r in a):
        raise DimensionMismatch("inverse of a non-square matrix")
    augmented = [list(r) + list(unit(i, n)) for i, r in enumerate(a)]
    reduced, pivots = rref(augmented, 2 * n)
    if tuple(pivots[:n]) != tuple(range(n)) or len(reduced) < n:
        raise DimensionMismatch("matrix is singular")
    return tuple(tuple(r[n:]) for r in reduced)
