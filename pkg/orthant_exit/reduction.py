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
Reduced support of a distribution.

A direction u in the orthant is admissible after (u_1..u_{k-1}) when every
atom lying in W = u_1^perp ∩ ... ∩ u_{k-1}^perp satisfies <u, y> <= 0 and u is
not in the span of the earlier directions. Repeating until no admissible
direction is left gives a maximal tuple; V is the orthogonal complement of its
span. Directions are normalized to coordinate sum 1 so they stay rational.

Index sets are 0-based here. The CLI prints them 1-based.
"""

import logging
import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from . import lp
from . import rational as rq
from .distribution import FiniteDistribution, Subspace, require_valid
from .errors import DimensionMismatch, NotInOrthant, NotInV

__all__ = [
    "ReducedSupport", "find_admissible_direction", "build_reduced_support",
    "check_admissible", "v_plus_contains", "depth", "direction_polytope",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReducedSupport:
    directions: Tuple[rq.Vector, ...]
    V: Subspace
    I: Tuple[int, ...]
    I_perp: Tuple[int, ...]

    @property
    def well_oriented(self) -> bool:
        return not self.directions

    @property
    def dimension(self) -> int:
        return self.V.ambient_dimension

    @property
    def V_basis(self) -> rq.Matrix:
        return self.V.basis

    @cached_property
    def V2(self) -> Subspace:
        """V ∩ [e_i, i in I]^perp, so that V = V1 ⊕ V2 with V1 = [e_i, i in I]."""
        rows = list(self.directions) + [rq.unit(i, self.dimension) for i in self.I]
        return Subspace.spanned_by(rq.orthogonal_complement(rows, self.dimension), self.dimension)

    @cached_property
    def coordinate_basis(self) -> np.ndarray:
        """
        Float basis of V as columns: e_i for i in I first, then an orthonormal
        basis of V2. The first len(I) coordinates carry the V+ sign constraint.
        """
        d = self.dimension
        v1 = np.zeros((d, len(self.I)))
        for k, i in enumerate(self.I):
            v1[i, k] = 1.0
        v2 = self.V2.float_basis()
        if v2.shape[1]:
            v2, _ = np.linalg.qr(v2)
        return np.hstack([v1, v2])

    @property
    def span(self) -> Subspace:
        return Subspace.spanned_by(self.directions, self.dimension)


def direction_polytope(dist: FiniteDistribution, W: Subspace):
    """Rows of {u >= 0, sum u = 1, <u, y> <= 0 for atoms y in W} as (A_eq, b_eq, A_le, b_le)."""
    d = dist.dimension
    blocking = [a.point for a in dist.atoms if W.contains(a.point)]
    return [tuple(1 for _ in range(d))], [1], blocking, [0] * len(blocking)


def find_admissible_direction(dist: FiniteDistribution, W: Subspace, span_so_far: Subspace,
                              rng: Optional[random.Random] = None) -> Optional[rq.Vector]:
    """
    Find the next direction of an admissible tuple.

    Args:
        dist (FiniteDistribution): the measure mu.
        W (Subspace): intersection of u_k^perp over the directions found so far.
        span_so_far (Subspace): span of the directions found so far.
        rng (random.Random): optional; shuffles the order in which complement
            directions are tried. The default order is index order.

    Returns:
        u in the orthant with coordinate sum 1, <u, y> <= 0 for every atom y in W
        and u outside span_so_far, or None when no such u exists.
    """
    d = dist.dimension
    A_eq, b_eq, A_le, b_le = direction_polytope(dist, W)
    if lp.feasible_point(A_eq, b_eq, A_le, b_le, n=d) is None:
        logger.debug("direction polytope is empty")
        return None

    escape = list(span_so_far.complement_basis)
    if rng is not None:
        rng.shuffle(escape)
    for c in escape:
        for sign in (1, -1):
            program = lp.LinearProgram(
                objective=[sign * ci for ci in c],
                A=A_eq + A_le,
                rhs=b_eq + b_le,
                senses=[lp.EQ] * len(A_eq) + [lp.LE] * len(A_le),
            )
            result = lp.solve(program)
            if result.optimal and not rq.in_span(result.x, span_so_far.basis):
                logger.debug(f"admissible direction {rq.format_vector(result.x)}")
                return result.x
    return None


def build_reduced_support(dist: FiniteDistribution, rng: Optional[random.Random] = None) -> ReducedSupport:
    """
    Build a maximal admissible tuple and the reduced support V.

    The walk is well oriented (no direction at all) iff condition (H) holds,
    in which case V = R^d.
    """
    require_valid(dist)
    d = dist.dimension
    directions = []
    span = Subspace.zero(d)
    W = Subspace.full(d)
    while True:
        u = find_admissible_direction(dist, W, span, rng=rng)
        if u is None:
            break
        directions.append(u)
        span = Subspace.spanned_by(directions, d)
        W = span.complement()

    V = W
    I = tuple(i for i in range(d) if V.contains(rq.unit(i, d)))
    I_perp = tuple(i for i in range(d) if span.contains(rq.unit(i, d)))
    logger.info(f"reduced support: {len(directions)} directions, dim V = {V.dimension}, I = {I}, I_perp = {I_perp}")
    return ReducedSupport(directions=tuple(directions), V=V, I=I, I_perp=I_perp)


def check_admissible(dist: FiniteDistribution, directions: Sequence[Sequence]) -> bool:
    """
    Exact check that directions form an admissible tuple: orthant vectors,
    linearly independent, and for each k every atom in the orthogonal
    complement of the earlier directions satisfies <u_k, y> <= 0.
    """
    d = dist.dimension
    directions = [rq.vector(u) for u in directions]
    if any(len(u) != d for u in directions):
        raise DimensionMismatch("direction dimension differs from the distribution dimension")
    if any(c < 0 for u in directions for c in u):
        return False
    if rq.rank(directions) != len(directions):
        return False
    for k, u in enumerate(directions):
        W = Subspace.spanned_by(directions[:k], d).complement()
        if any(rq.dot(u, a.point) > 0 for a in dist.atoms if W.contains(a.point)):
            return False
    return True


def v_plus_contains(rs: ReducedSupport, x: Sequence) -> bool:
    """
    Membership in V+ = {x in V : x_i >= 0 for i in I}.

    Raises:
        NotInV: x is not in V.
    """
    x = rq.vector(x)
    if not rs.V.contains(x):
        raise NotInV(f"{rq.format_vector(x)} is not in the reduced support")
    return all(x[i] >= 0 for i in rs.I)


def depth(rs: ReducedSupport, x: Sequence) -> float:
    """
    d(x) = min of x_i over i outside I ∪ I_perp, or +inf when that set is empty.

    Raises:
        NotInOrthant: some coordinate of x is negative.
    """
    if len(x) != rs.dimension:
        raise DimensionMismatch(f"x has length {len(x)}, expected {rs.dimension}")
    if any(c < 0 for c in x):
        raise NotInOrthant(f"{list(x)} is not in the orthant")
    outside = [x[i] for i in range(rs.dimension) if i not in rs.I and i not in rs.I_perp]
    if not outside:
        return math.inf
    return float(min(outside))
