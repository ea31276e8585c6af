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
import warnings

import numpy as np
import pytest

from conftest import random_distribution
from orthant_exit import laplace
from orthant_exit.distribution import FiniteDistribution, mean, validate
from orthant_exit.errors import DimensionMismatch, Overflow


def test_value_at_zero_is_one(ex1, ex2, ex3):
    for dist in (ex1, ex2, ex3):
        assert laplace.laplace_eval(dist, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.5, 2.0, 7.5])
def test_example1_on_the_diagonal(ex1, t):
    assert laplace.laplace_eval(ex1, [t, t]) == pytest.approx(0.5 + 0.5 * math.exp(-2 * t), rel=1e-14)


@pytest.mark.parametrize("z", [(0.0, 0.0), (1.0, -0.5), (3.0, 2.0)])
def test_example2_closed_form(ex2, z):
    i, j = z
    expected = 0.2 * math.exp(-i) + 0.3 * math.exp(j) + 0.5 * math.exp(-j)
    assert laplace.laplace_eval(ex2, z) == pytest.approx(expected, rel=1e-14)


def test_gradient_at_zero_is_the_mean(ex2):
    assert np.allclose(laplace.laplace_grad(ex2, [0.0, 0.0]), [float(m) for m in mean(ex2)], atol=1e-15)


@pytest.mark.parametrize("z", [(0.3, -0.2), (1.0, 1.0), (-0.7, 0.4)])
def test_finite_differences(ex1, ex2, ex3, z):
    h = 1e-5
    z = np.array(z)
    for dist in (ex1, ex2, ex3):
        grad = laplace.laplace_grad(dist, z)
        hess = laplace.laplace_hess(dist, z)
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            fd = (laplace.laplace_eval(dist, z + e) - laplace.laplace_eval(dist, z - e)) / (2 * h)
            assert abs(fd - grad[k]) <= 1e-6 * (1 + np.linalg.norm(grad))
            fd_grad = (laplace.laplace_grad(dist, z + e) - laplace.laplace_grad(dist, z - e)) / (2 * h)
            assert np.allclose(fd_grad, hess[:, k], rtol=1e-5, atol=1e-8)


def test_hessian_is_symmetric_psd(ex3):
    hess = laplace.laplace_hess(ex3, [0.4, -1.1])
    assert np.array_equal(hess, hess.T)
    assert np.all(np.linalg.eigvalsh(hess) >= -1e-12)


def test_log_laplace_survives_large_arguments(ex1):
    assert laplace.log_laplace(ex1, [2000.0, 0.0]) == pytest.approx(2000.0 + math.log(0.25), rel=1e-12)
    with pytest.raises(Overflow):
        laplace.laplace_eval(ex1, [2000.0, 0.0])


def test_huge_finite_arguments_overflow_without_warnings(ex1):
    huge = [1e308, -1e308]
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for fn in (laplace.laplace_eval, laplace.log_laplace, laplace.laplace_grad):
            with pytest.raises(Overflow):
                fn(ex1, huge)


def test_errors(ex1):
    with pytest.raises(DimensionMismatch):
        laplace.laplace_eval(ex1, [0.0])
    with pytest.raises(Overflow):
        laplace.laplace_eval(ex1, [float("inf"), 0.0])


def test_tilt_drift_matches_gradient(ex3):
    z = np.array([0.3, 0.1])
    tilted = laplace.tilt(ex3, z)
    assert validate(tilted).valid
    assert not tilted.exact
    expected = laplace.laplace_grad(ex3, z) / laplace.laplace_eval(ex3, z)
    assert np.allclose(mean(tilted), expected, atol=1e-14)


def test_tilt_at_zero_keeps_weights(ex2):
    tilted = laplace.tilt(ex2, [0.0, 0.0])
    assert tilted.weights.tolist() == pytest.approx(ex2.weights.tolist(), abs=1e-16)
    assert [a.point for a in tilted.atoms] == [a.point for a in ex2.atoms]


def test_tilt_point(ex2):
    point = laplace.tilt_point(ex2, [0.0, 1.0])
    assert point.vector == (0.0, 1.0)
    assert point.value == pytest.approx(0.2 + 0.3 * math.e + 0.5 / math.e)


def test_one_dimensional():
    dist = FiniteDistribution.from_pairs([((1,), "1/3"), ((-1,), "2/3")])
    assert laplace.laplace_eval(dist, [math.log(2) / 2]) == pytest.approx(2 * math.sqrt(2) / 3)


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3"])
def test_tilt_laplace_identity(request, name):
    dist = request.getfixturevalue(name)
    x0 = np.array([0.4, -0.3])
    tilted = laplace.tilt(dist, x0)
    base = laplace.laplace_eval(dist, x0)
    for z in np.random.default_rng(7).uniform(-2.0, 2.0, size=(10, 2)):
        expected = laplace.laplace_eval(dist, z + x0) / base
        assert laplace.laplace_eval(tilted, z) == pytest.approx(expected, rel=1e-10)


def test_tilts_compose(ex3):
    a, b = np.array([0.7, -0.2]), np.array([-0.3, 1.1])
    twice = laplace.tilt(laplace.tilt(ex3, a), b)
    once = laplace.tilt(ex3, a + b)
    assert [x.point for x in twice.atoms] == [x.point for x in once.atoms]
    assert np.allclose(twice.weights, once.weights, rtol=0, atol=1e-15)


def test_convexity(rng):
    gen = np.random.default_rng(11)
    for _ in range(20):
        d = rng.randint(1, 3)
        dist = random_distribution(rng, d)
        for _ in range(5):
            z1, z2 = gen.uniform(-1.0, 1.0, size=(2, d))
            t = float(gen.uniform())
            rhs = t * laplace.laplace_eval(dist, z1) + (1 - t) * laplace.laplace_eval(dist, z2)
            assert laplace.laplace_eval(dist, t * z1 + (1 - t) * z2) <= rhs + 1e-10 * (1 + rhs)
