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

import random
from fractions import Fraction
from pathlib import Path

import pytest

from orthant_exit.distribution import FiniteDistribution
from orthant_exit.polyhedron import StandardPolyhedron

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def example1(q=Fraction(1, 4)):
    p = 1 - 2 * q
    return FiniteDistribution.from_pairs([((1, -1), q), ((-1, 1), q), ((-1, -1), p)])


def example2(alpha, beta, gamma):
    return FiniteDistribution.from_pairs([((-1, 0), alpha), ((0, 1), beta), ((0, -1), gamma)])


def example3(alpha, beta, gamma):
    return FiniteDistribution.from_pairs([((-1, -1), alpha), ((-1, 1), beta), ((1, -1), gamma)])


def random_distribution(rng: random.Random, d: int, max_atoms: int = 5, span: int = 2) -> FiniteDistribution:
    """Distinct integer atoms in [-span, span]^d with random rational weights."""
    k = rng.randint(2, max_atoms)
    points = set()
    while len(points) < k:
        points.add(tuple(rng.randint(-span, span) for _ in range(d)))
    raw = [rng.randint(1, 9) for _ in range(k)]
    total = sum(raw)
    return FiniteDistribution.from_pairs([(p, Fraction(w, total)) for p, w in zip(sorted(points), raw)], dimension=d)


def random_rational(rng: random.Random, nonnegative: bool = False) -> Fraction:
    num = rng.randint(0 if nonnegative else -9, 9)
    return Fraction(num, rng.randint(1, 9))


def random_polyhedron(rng: random.Random, max_n: int = 6, max_m: int = 3):
    """A random nonempty polyhedron and a member x; b is built from x so that x is in P."""
    m = rng.randint(1, max_m)
    n = rng.randint(m, max_n)
    columns = [tuple(random_rational(rng) for _ in range(m)) for _ in range(n)]
    x = tuple(random_rational(rng, nonnegative=True) for _ in range(n))
    b = tuple(sum((xi * c[k] for xi, c in zip(x, columns)), Fraction(0)) for k in range(m))
    return StandardPolyhedron(columns=columns, b=b), x


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex2():
    return example2(Fraction(1, 5), Fraction(3, 10), Fraction(1, 2))


@pytest.fixture
def ex3():
    return example3(Fraction(1, 3), Fraction(1, 3), Fraction(1, 3))


@pytest.fixture
def simple_walk():
    q = Fraction(1, 4)
    return FiniteDistribution.from_pairs([((1, 0), q), ((0, 1), q), ((-1, 0), q), ((0, -1), q)])


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def data_dir():
    return DATA_DIR
