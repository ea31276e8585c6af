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

import json
from fractions import Fraction

import pytest

from conftest import random_distribution
from orthant_exit.distribution import (FiniteDistribution, Subspace, load_distribution, mean, require_valid, restrict,
                                       validate)
from orthant_exit.errors import InvalidDistribution, InvalidSubspace, ParseError, ZeroMass


def test_examples_are_valid(ex1, ex2, ex3, simple_walk):
    for dist in (ex1, ex2, ex3, simple_walk):
        assert validate(dist).valid
        assert dist.lattice_flag
        assert dist.exact


def test_validate_reports_every_issue():
    dist = FiniteDistribution.from_pairs([((1, 0), Fraction(1, 2)), ((1, 0), Fraction(1, 3)), ((0, 1, 2), 0)], dimension=2)
    issues = validate(dist).issues
    assert any("dimension 3" in i for i in issues)
    assert any("non-positive weight" in i for i in issues)
    assert any("total mass" in i for i in issues)
    assert any("share the point" in i for i in issues)
    with pytest.raises(InvalidDistribution):
        require_valid(dist)


def test_validate_float_mass_tolerance():
    ok = FiniteDistribution.from_pairs([((1,), 0.1), ((-1,), 0.9)])
    assert validate(ok).valid
    bad = FiniteDistribution.from_pairs([((1,), 0.1), ((-1,), 0.8)])
    assert not validate(bad).valid


def test_empty_and_oversized():
    assert not validate(FiniteDistribution(dimension=2, atoms=())).valid
    big = FiniteDistribution.from_pairs([(tuple([1] * 17), 1)])
    assert any("cap" in i for i in validate(big).issues)


def test_mean_examples(ex1, ex2):
    assert mean(ex1) == (Fraction(-1, 2), Fraction(-1, 2))
    assert mean(ex2) == (Fraction(-1, 5), Fraction(-1, 5))


def test_restrict_example2(ex2):
    e1_perp = Subspace.spanned_by([(0, 1)], 2)
    conditioned, mass = restrict(ex2, e1_perp)
    assert mass == Fraction(4, 5)
    weights = {a.point: a.weight for a in conditioned.atoms}
    assert weights == {(0, 1): Fraction(3, 8), (0, -1): Fraction(5, 8)}


def test_restrict_zero_mass(ex1):
    with pytest.raises(ZeroMass):
        restrict(ex1, Subspace.spanned_by([(1, 0)], 2))


def test_subspace_operations():
    diagonal = Subspace.spanned_by([(1, 1)], 2)
    assert diagonal.dimension == 1
    assert diagonal.contains((3, 3))
    assert not diagonal.contains((1, 0))
    assert diagonal.complement().contains((1, -1))
    assert diagonal.intersect(Subspace.full(2)).same_as(diagonal)
    assert diagonal.intersect(diagonal.complement()).dimension == 0
    assert Subspace.spanned_by([(2, 2), (1, 1)], 2).same_as(diagonal)
    assert diagonal.float_basis().shape == (2, 1)
    with pytest.raises(InvalidSubspace):
        Subspace(ambient_dimension=2, basis=((1, 1), (2, 2)))


def test_load_example_files(data_dir, ex2):
    loaded = load_distribution(data_dir / "example2.json")
    assert loaded == ex2


def test_load_accepts_exact_floats(tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"dimension": 1, "atoms": [{"point": [1], "weight": 0.2}, {"point": [-1], "weight": "4/5"}]}))
    dist = load_distribution(path)
    assert dist.atoms[0].weight == Fraction(1, 5)
    assert dist.exact


@pytest.mark.parametrize("text", [
    "not json",
    json.dumps({"atoms": []}),
    json.dumps({"dimension": 1, "atoms": [{"point": [1], "weight": "x"}]}),
    json.dumps({"dimension": 1, "atoms": [{"point": [True], "weight": 1}]}),
])
def test_load_parse_errors(tmp_path, text):
    path = tmp_path / "dist.json"
    path.write_text(text)
    with pytest.raises(ParseError):
        load_distribution(path)


def test_load_invalid_distribution(tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"dimension": 1, "atoms": [{"point": [1], "weight": "1/2"}]}))
    with pytest.raises(InvalidDistribution):
        load_distribution(path)


def test_to_json_round_trip(tmp_path, ex3):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps(ex3.to_json()))
    assert load_distribution(path) == ex3


def test_restrict_to_the_whole_space(ex1, ex2, ex3):
    for dist in (ex1, ex2, ex3):
        conditioned, mass = restrict(dist, Subspace.full(2))
        assert mass == 1
        assert conditioned.atoms == dist.atoms


def test_restrict_composes():
    dist = FiniteDistribution.from_pairs([
        ((1, 0, 0), Fraction(1, 8)), ((0, 1, 0), Fraction(1, 8)), ((1, 1, 0), Fraction(1, 4)),
        ((2, 2, 0), Fraction(1, 8)), ((0, 0, 1), Fraction(1, 8)), ((-1, -1, -1), Fraction(1, 4)),
    ])
    plane = Subspace.spanned_by([(1, 0, 0), (0, 1, 0)], 3)
    line = Subspace.spanned_by([(1, 1, 0)], 3)
    on_plane, plane_mass = restrict(dist, plane)
    nested, line_mass = restrict(on_plane, line)
    direct, direct_mass = restrict(dist, line)
    assert plane_mass * line_mass == direct_mass == Fraction(3, 8)
    assert nested.atoms == direct.atoms
    assert {a.point: a.weight for a in direct.atoms} == {(1, 1, 0): Fraction(2, 3), (2, 2, 0): Fraction(1, 3)}


def test_restrict_composes_on_random_distributions(rng):
    for _ in range(30):
        dist = random_distribution(rng, 3)
        outer = Subspace.spanned_by([dist.atoms[0].point, dist.atoms[1].point], 3)
        inner = Subspace.spanned_by([dist.atoms[0].point], 3)
        on_outer, outer_mass = restrict(dist, outer)
        nested, inner_mass = restrict(on_outer, inner)
        direct, direct_mass = restrict(dist, inner)
        assert outer_mass * inner_mass == direct_mass
        assert nested.atoms == direct.atoms
