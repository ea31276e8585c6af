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
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import example1, example2, example3, random_distribution
from orthant_exit import laplace, rates
from orthant_exit import rational as rq
from orthant_exit.cli import cmd_analyze, main, parse_config
from orthant_exit.distribution import FiniteDistribution, Subspace
from orthant_exit.errors import EXIT_OK, DegenerateZero
from orthant_exit.optimizer import analyze
from orthant_exit.polyhedron import ExtendedPolyhedron, extended_bound, extended_reduce
from orthant_exit.reduction import build_reduced_support

F = Fraction

EXAMPLE2_BETA_BELOW_GAMMA = [(F(1, 5), F(3, 10), F(1, 2)), (F(1, 3), F(1, 3), F(1, 3)), (F(1, 10), F(1, 5), F(7, 10))]
EXAMPLE2_BETA_ABOVE_GAMMA = [(F(1, 5), F(1, 2), F(3, 10)), (F(1, 10), F(7, 10), F(1, 5)), (F(1, 2), F(3, 10), F(1, 5))]
EXAMPLE3_TRIPLES = [(F(1, 3), F(1, 3), F(1, 3)), (F(1, 5), F(3, 10), F(1, 2)), (F(1, 2), F(1, 10), F(2, 5))]


def _corpus():
    rng = random.Random(314)
    corpus = [example1(), example2(F(1, 5), F(3, 10), F(1, 2)), example3(F(1, 3), F(1, 3), F(1, 3))]
    corpus += [random_distribution(rng, 1 + k % 3) for k in range(20)]
    return corpus


def _grid_minimum(dist):
    """Minimum of L over [0, 20]^2: a 0.01 grid, then a 0.001 grid around the best cell."""
    def best(i, j):
        I, J = np.meshgrid(i, j, indexing="ij")
        values = sum(w * np.exp(I * float(a.point[0]) + J * float(a.point[1])) for w, a in zip(dist.weights, dist.atoms))
        k = np.unravel_index(np.argmin(values), values.shape)
        return float(values[k]), float(I[k]), float(J[k])

    axis = np.linspace(0.0, 20.0, 2001)
    _, i0, j0 = best(axis, axis)
    fine_i = np.clip(np.arange(i0 - 0.02, i0 + 0.0205, 0.001), 0.0, 20.0)
    fine_j = np.clip(np.arange(j0 - 0.02, j0 + 0.0205, 0.001), 0.0, 20.0)
    return best(fine_i, fine_j)[0]


def _analyze_file(dist, tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps(dist.to_json()))
    return cmd_analyze(parse_config(["analyze", "--dist", str(path)], environ={}))


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_example1_closed_form_rate(N):
    report = rates.spectral_rate(example1(), (N, N))
    assert report.rate == pytest.approx(0.5 * math.cos(math.pi / (2 * N + 2)), abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("alpha,beta,gamma", EXAMPLE2_BETA_BELOW_GAMMA + EXAMPLE2_BETA_ABOVE_GAMMA)
def test_example2_infimum(tmp_path, alpha, beta, gamma):
    dist = example2(alpha, beta, gamma)
    report = _analyze_file(dist, tmp_path)
    if gamma >= beta:
        expected = 2 * math.sqrt(beta * gamma)
    else:
        expected = float(beta + gamma)
    assert report.inf_value == pytest.approx(expected, abs=1e-9)
    assert report.inf_value == pytest.approx(_grid_minimum(dist), abs=1e-6)


@pytest.mark.slow
@pytest.mark.parametrize("alpha,beta,gamma", EXAMPLE3_TRIPLES)
def test_example3_infimum(tmp_path, alpha, beta, gamma):
    dist = example3(alpha, beta, gamma)
    report = _analyze_file(dist, tmp_path)
    assert report.inf_value == pytest.approx(2 * math.sqrt(beta * gamma), abs=1e-9)
    assert report.inf_value == pytest.approx(_grid_minimum(dist), abs=1e-6)


@pytest.mark.slow
def test_rates_approach_the_infimum_with_depth():
    dist = example3(F(1, 3), F(1, 3), F(1, 3))
    reports = rates.rate_sweep(dist, [(R, R) for R in (2, 5, 10, 20)], engine="spectral")
    values = [r.rate for r in reports]
    assert values == sorted(values)
    assert all(v <= 2 / 3 + 1e-6 for v in values)
    assert values[-1] >= 2 / 3 - 0.05


@pytest.mark.slow
def test_universal_upper_bound():
    for dist in _corpus():
        context = rates.RateContext.build(dist)
        start = tuple(2 for _ in range(dist.dimension))
        report = rates.spectral_rate(dist, start, trunc=6, context=context)
        assert report.rate <= context.bound + 1e-6
    for dist, start in ((example1(), (3, 3)), (example3(F(1, 3), F(1, 3), F(1, 3)), (3, 3))):
        context = rates.RateContext.build(dist)
        for engine in ("dp", "mc", "mc-tilted"):
            report = rates.estimate_rate(context, start, engine=engine, n_max=200 if engine == "dp" else 40,
                                         samples=20_000, seed=1)
            assert report.within_bound, (engine, report.rate, context.bound)


@pytest.mark.parametrize("x0", [(0.1, 0.2), (0.5, 0.0), (1.0, 1.0)])
def test_cramer_identity_on_example2(x0):
    dist = example2(F(1, 5), F(3, 10), F(1, 2))
    for start in ((0, 0), (1, 3), (2, 1)):
        direct = rates.survival_dp(dist, start, 10).probabilities
        tilted = rates.cramer_survival_dp(dist, x0, start, 10).probabilities
        for p, q in zip(direct, tilted):
            assert abs(p - q) <= 1e-9 * p


@pytest.mark.parametrize("factory,V,I,I_perp", [
    (example1, [(1, -1)], (), ()),
    (lambda: example2(F(1, 5), F(3, 10), F(1, 2)), [(0, 1)], (1,), (0,)),
    (lambda: example3(F(1, 3), F(1, 3), F(1, 3)), [(1, -1)], (), ()),
])
def test_reduction_matches_the_worked_examples(factory, V, I, I_perp):
    dist = factory()
    rs = build_reduced_support(dist)
    assert rs.V.same_as(Subspace.spanned_by(V, 2))
    assert (rs.I, rs.I_perp) == (I, I_perp)
    rng = random.Random(99)
    for _ in range(50):
        pairs = [(a.point, a.weight) for a in dist.atoms]
        rng.shuffle(pairs)
        other = build_reduced_support(FiniteDistribution.from_pairs(pairs), rng=rng)
        assert rq.rank(list(rs.directions) + list(other.directions)) == len(rs.directions) == len(other.directions)


def test_tilted_drift_vanishes_on_free_directions():
    for dist in _corpus():
        try:
            rs, report = analyze(dist)
        except DegenerateZero:
            continue
        drift = np.asarray(report.drift)
        assert all(abs(drift[i]) <= 1e-6 for i in report.K)
        v2 = rs.coordinate_basis[:, len(rs.I):]
        if v2.shape[1]:
            assert np.linalg.norm(v2.T @ drift) <= 1e-6


def test_extended_reduction_bound():
    rng = random.Random(2718)
    for _ in range(100):
        n = rng.randint(1, 3)
        L = [[F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)] for _ in range(n)]
        phi = [F(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(n)]
        x = [F(rng.randint(0, 9), rng.randint(1, 9)) for _ in range(n)]
        b = [rq.dot(row, x) for row in L]
        c = rq.dot(phi, x) - F(rng.randint(0, 9), rng.randint(1, 9))
        EP = ExtendedPolyhedron(L=L, phi=phi, b=b, c=c)
        y = extended_reduce(EP, x)
        assert EP.contains(y)
        assert all(yi <= xi for yi, xi in zip(y, x))
        assert rq.norm1(y) <= extended_bound(EP) * (rq.norm1(EP.b) + abs(EP.c))


def test_finite_differences_on_the_corpus():
    rng = np.random.default_rng(5)
    h = 1e-5
    for dist in _corpus():
        d = dist.dimension
        z = rng.uniform(-0.5, 0.5, size=d)
        grad = laplace.laplace_grad(dist, z)
        hess = laplace.laplace_hess(dist, z)
        for k in range(d):
            e = np.zeros(d)
            e[k] = h
            fd = (laplace.laplace_eval(dist, z + e) - laplace.laplace_eval(dist, z - e)) / (2 * h)
            assert abs(fd - grad[k]) <= 1e-5 * max(1.0, np.linalg.norm(grad))
            fd_grad = (laplace.laplace_grad(dist, z + e) - laplace.laplace_grad(dist, z - e)) / (2 * h)
            assert np.linalg.norm(fd_grad - hess[:, k]) <= 1e-5 * max(1.0, np.linalg.norm(hess))


def test_mc_files_are_byte_identical_across_threads(data_dir, tmp_path):
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"rate_{threads}.json"
        code = main(["rate", "--dist", str(data_dir / "example1.json"), "--start", "2,2", "--engine", "mc",
                     "--n", "20", "--samples", "20000", "--seed", "17", "--threads", threads, "--out", str(out)])
        assert code == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
