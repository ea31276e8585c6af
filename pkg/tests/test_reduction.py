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

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import example1, example2, example3, random_distribution
from orthant_exit import rational as rq
from orthant_exit.distribution import FiniteDistribution, Subspace
from orthant_exit.errors import DimensionMismatch, NotInOrthant, NotInV
from orthant_exit.reduction import (build_reduced_support, check_admissible, depth, find_admissible_direction,
                                    v_plus_contains)

HALF = Fraction(1, 2)


def _shuffled(dist, rng):
    pairs = [(a.point, a.weight) for a in dist.atoms]
    rng.shuffle(pairs)
    return FiniteDistribution.from_pairs(pairs, dimension=dist.dimension)


def test_first_direction_of_example1(ex1):
    u = find_admissible_direction(ex1, Subspace.full(2), Subspace.zero(2))
    assert u == (HALF, HALF)


def test_example2_tuple_is_maximal(ex2):
    u = find_admissible_direction(ex2, Subspace.full(2), Subspace.zero(2))
    assert u == (1, 0)
    e1 = Subspace.spanned_by([(1, 0)], 2)
    assert find_admissible_direction(ex2, e1.complement(), e1) is None


def test_well_oriented_walk(simple_walk):
    assert find_admissible_direction(simple_walk, Subspace.full(2), Subspace.zero(2)) is None
    rs = build_reduced_support(simple_walk)
    assert rs.well_oriented
    assert rs.V.same_as(Subspace.full(2))
    assert rs.I == (0, 1)
    assert rs.I_perp == ()
    assert v_plus_contains(rs, (2, 0))
    assert not v_plus_contains(rs, (2, -1))


def test_example2_reduced_support(ex2):
    rs = build_reduced_support(ex2)
    assert not rs.well_oriented
    assert rs.directions == ((1, 0),)
    assert rs.V.same_as(Subspace.spanned_by([(0, 1)], 2))
    assert rs.I == (1,)
    assert rs.I_perp == (0,)
    assert rs.V2.dimension == 0
    assert np.allclose(rs.coordinate_basis, [[0.0], [1.0]])


@pytest.mark.parametrize("factory", [example1, lambda: example3(*[Fraction(1, 3)] * 3)])
def test_diagonal_reduced_support(factory):
    rs = build_reduced_support(factory())
    assert rs.directions == ((HALF, HALF),)
    assert rs.V.same_as(Subspace.spanned_by([(1, -1)], 2))
    assert rs.I == ()
    assert rs.I_perp == ()
    basis = rs.coordinate_basis
    assert basis.shape == (2, 1)
    assert abs(basis[:, 0] @ [1.0, 1.0]) < 1e-15
    assert np.linalg.norm(basis[:, 0]) == pytest.approx(1.0)


def test_v_plus_membership(ex2, ex3):
    rs2 = build_reduced_support(ex2)
    assert v_plus_contains(rs2, (0, 5))
    assert not v_plus_contains(rs2, (0, -1))
    with pytest.raises(NotInV):
        v_plus_contains(rs2, (1, 0))
    rs3 = build_reduced_support(ex3)
    assert v_plus_contains(rs3, (4, -4))
    assert v_plus_contains(rs3, ("-1/2", "1/2"))


def test_depth(ex1, ex2, ex3):
    assert depth(build_reduced_support(ex3), (3, 7)) == 3
    assert depth(build_reduced_support(ex1), (5, 2)) == 2
    assert depth(build_reduced_support(ex2), (4, 9)) == math.inf
    with pytest.raises(NotInOrthant):
        depth(build_reduced_support(ex3), (1, -1))
    with pytest.raises(DimensionMismatch):
        depth(build_reduced_support(ex3), (1, 1, 1))


def test_check_admissible(ex1, ex2):
    assert check_admissible(ex2, [(1, 0)])
    assert not check_admissible(ex2, [(0, 1)])
    assert not check_admissible(ex1, [(1, 0)])
    assert check_admissible(ex1, [(1, 1)])
    assert not check_admissible(ex1, [(1, 1), (2, 2)])
    assert not check_admissible(ex1, [(-1, 2)])
    assert check_admissible(ex1, [])
    with pytest.raises(DimensionMismatch):
        check_admissible(ex1, [(1, 1, 1)])


@pytest.mark.parametrize("factory", [
    example1,
    lambda: example2(Fraction(1, 5), Fraction(3, 10), Fraction(1, 2)),
    lambda: example3(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
])
def test_span_does_not_depend_on_ordering(factory):
    dist = factory()
    reference = build_reduced_support(dist).span
    rng = random.Random(7)
    for _ in range(50):
        rs = build_reduced_support(_shuffled(dist, rng), rng=rng)
        assert rs.span.same_as(reference)
        assert check_admissible(dist, rs.directions)


@pytest.mark.parametrize("d", [2, 3])
def test_random_distributions(rng, d):
    for _ in range(25):
        dist = random_distribution(rng, d)
        rs = build_reduced_support(dist)
        assert check_admissible(dist, rs.directions)
        assert rs.V.dimension + len(rs.directions) == d
        assert rs.well_oriented == (find_admissible_direction(dist, Subspace.full(d), Subspace.zero(d)) is None)
        assert not set(rs.I) & set(rs.I_perp)
        for u in rs.directions:
            assert sum(u) == 1
            assert all(c >= 0 for c in u)
        # maximality: nothing admissible is left
        assert find_admissible_direction(dist, rs.V, rs.span) is None
        shuffled = build_reduced_support(_shuffled(dist, rng), rng=rng)
        assert shuffled.span.same_as(rs.span)
        assert rq.rank(list(rs.directions) + list(shuffled.directions)) == len(rs.directions)
