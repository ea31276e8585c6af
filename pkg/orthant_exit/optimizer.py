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
Infimum of the Laplace transform over the orthant.

inf_Q L = mu(V) * min over V+ of L_{mu|V}, where V is the reduced support.
The minimum on V+ exists, so it is found with a projected Newton method on
coordinates of V: the first |I| coordinates are the e_i (i in I) and carry the
sign constraint, the rest form an orthonormal basis of V2 and are free.

Usage:
    rs, report = analyze(dist)
    report.inf_value, report.v0, report.K
"""

import logging
import math
import random
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np

from . import laplace
from .distribution import FiniteDistribution, require_valid, restrict
from .errors import DegenerateZero, NoConvergence, NotInOrthant, Overflow, ZeroMass
from .reduction import ReducedSupport, build_reduced_support

__all__ = [
    "BOUND_SLACK", "OptimizerSettings", "MinimizerReport", "BoxMinimum",
    "minimize_on_vplus", "minimize_on_box", "analyze", "infimum", "upper_bound_check", "tilt_bound",
]

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-6

_ARMIJO = 1e-4
_MAX_HALVINGS = 60
_EPS = float(np.finfo(float).eps)
# f values within this many ulps of each other are indistinguishable
_NOISE_ULPS = 4.0
# a stalled iterate is accepted when the gap is within this factor of tol
_STALL_FACTOR = 10.0


@dataclass(frozen=True)
class OptimizerSettings:
    tol: float = 1e-9
    max_iter: int = 10_000
    condition_cap: float = 1e12
    active_factor: float = 1e-7


@dataclass(frozen=True)
class MinimizerReport:
    """
    Result of minimizing L_{mu|V} on V+.

    inf_value = muV * lambda_. K holds the indices i in I where v0 is
    strictly inside the half-space, i.e. v0_i > tol_active. drift is the drift
    of the Cramer tilt of mu|V at v0.
    """
    inf_value: float
    v0: Tuple[float, ...]
    lambda_: float
    muV: float
    K: Tuple[int, ...]
    kkt_residual: float
    attained: bool
    drift: Tuple[float, ...] = ()
    iterations: int = 0


@dataclass(frozen=True)
class BoxMinimum:
    value: float
    point: Tuple[float, ...]
    iterations: int


@dataclass
class _Iterate:
    x: np.ndarray
    f: float
    g: np.ndarray
    H: np.ndarray


def _projected_residual(x, g, lower, upper) -> np.ndarray:
    return x - np.clip(x - g, lower, upper)


def _projected_newton(fun: Callable, start: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                      settings: OptimizerSettings):
    """
    Minimize a smooth convex function over the box [lower, upper].

    fun(x) returns (f, g, H) and may raise Overflow. Newton steps are taken on
    the coordinates that are not held at a bound. When the Hessian block is
    too ill conditioned (atoms not spanning the space, or exponentially flat
    directions) the step uses H + tau I with tau = |g|, and the plain gradient
    is the last resort. Steps are projected onto the box and accepted by an
    Armijo test along the projection arc that tolerates a few ulps of noise
    in f.

    Returns:
        (x, f, g, iterations)

    Raises:
        NoConvergence: the iteration cap was hit or no step decreases f while
            the projected gradient is still well above tolerance.
    """
    def evaluate(x):
        try:
            f, g, H = fun(x)
        except Overflow:
            return None
        return _Iterate(x=x, f=f, g=g, H=H)

    it = evaluate(np.clip(start, lower, upper))
    if it is None:
        raise Overflow("objective overflows at the starting point")

    for iteration in range(int(settings.max_iter)):
        residual = _projected_residual(it.x, it.g, lower, upper)
        gap = float(np.max(np.abs(residual))) if residual.size else 0.0
        threshold = settings.tol * (1.0 + abs(it.f))
        if gap <= threshold:
            logger.debug(f"projected newton converged in {iteration} iterations, f = {it.f:.12g}")
            return it.x, it.f, it.g, iteration

        eps = min(settings.active_factor, float(np.linalg.norm(residual)))
        binding = ((it.x <= lower + eps) & (it.g > 0)) | ((it.x >= upper - eps) & (it.g < 0))
        free = ~binding

        candidates = []
        if free.any():
            H_ff = it.H[np.ix_(free, free)]
            g_f = it.g[free]
            if np.linalg.cond(H_ff) > settings.condition_cap:
                tau = max(float(np.linalg.norm(g_f)), float(np.max(np.abs(np.diag(H_ff)))) / settings.condition_cap, _EPS)
                H_ff = H_ff + tau * np.eye(H_ff.shape[0])
                kind = "regularized"
            else:
                kind = "newton"
            d = -it.g.copy()
            d[free] = -np.linalg.solve(H_ff, g_f)
            if np.all(np.isfinite(d)) and g_f @ d[free] < 0:
                candidates.append((kind, d))
        candidates.append(("gradient", -it.g))

        noise = _NOISE_ULPS * _EPS * abs(it.f)
        accepted = None
        for kind, d in candidates:
            t = 1.0
            for _ in range(_MAX_HALVINGS):
                x_new = np.clip(it.x + t * d, lower, upper)
                if not np.any(x_new != it.x):
                    break
                trial = evaluate(x_new)
                if trial is not None and trial.f <= it.f + _ARMIJO * float(it.g @ (x_new - it.x)) + noise:
                    accepted = trial
                    break
                t *= 0.5
            if accepted is not None:
                if kind != "newton":
                    logger.debug(f"iteration {iteration}: {kind} step, t = {t:.3g}")
                break

        near = gap <= _STALL_FACTOR * threshold
        if accepted is None:
            if near:
                logger.debug(f"line search stalled at gap {gap:.3e}, within float noise of tol")
                return it.x, it.f, it.g, iteration
            raise NoConvergence(f"line search stalled with projected gradient {gap:.3e}", gap=gap, iterations=iteration)

        step = float(np.max(np.abs(accepted.x - it.x))) if it.x.size else 0.0
        scale = 1.0 + float(np.max(np.abs(it.x))) if it.x.size else 1.0
        if near and (step <= _NOISE_ULPS * _EPS * scale or abs(accepted.f - it.f) <= noise):
            logger.debug(f"projected newton stopped at machine precision after {iteration + 1} iterations, gap {gap:.3e}")
            better = accepted if accepted.f <= it.f else it
            return better.x, better.f, better.g, iteration + 1
        it = accepted

    residual = _projected_residual(it.x, it.g, lower, upper)
    gap = float(np.max(np.abs(residual))) if residual.size else 0.0
    raise NoConvergence(f"no convergence after {settings.max_iter} iterations, gap {gap:.3e}",
                        gap=gap, iterations=int(settings.max_iter))


def _kkt_residual(grad: np.ndarray, rs: ReducedSupport, K: Tuple[int, ...]) -> float:
    """Largest violation of: d_i L = 0 on K, d_i L >= 0 on I minus K, zero derivative along V2."""
    parts = [0.0]
    for i in rs.I:
        parts.append(abs(grad[i]) if i in K else max(0.0, -grad[i]))
    v2 = rs.coordinate_basis[:, len(rs.I):]
    if v2.shape[1]:
        parts.append(float(np.linalg.norm(v2.T @ grad)))
    return float(max(parts))


def minimize_on_vplus(dist: FiniteDistribution, rs: ReducedSupport, tol: float = None,
                      settings: Optional[OptimizerSettings] = None) -> MinimizerReport:
    """
    Minimize L_{mu|V} on V+ and assemble inf_Q L = mu(V) * lambda.

    Args:
        dist (FiniteDistribution): the measure mu.
        rs (ReducedSupport): its reduced support.
        tol (float): overrides settings.tol.
        settings (OptimizerSettings): iteration cap and tolerances.

    Raises:
        DegenerateZero: mu(V) = 0. The exception carries the report with inf_value 0.
        NoConvergence: the Newton iteration did not converge.
    """
    settings = settings or OptimizerSettings()
    if tol is not None:
        if tol <= 0:
            raise ValueError(f"tol must be positive, got {tol}")
        settings = replace(settings, tol=tol)
    require_valid(dist)
    d = dist.dimension

    try:
        conditioned, mass = restrict(dist, rs.V)
    except ZeroMass:
        report = MinimizerReport(inf_value=0.0, v0=tuple(0.0 for _ in range(d)), lambda_=0.0, muV=0.0,
                                 K=(), kkt_residual=0.0, attained=rs.well_oriented)
        logger.warning("reduced support carries no mass; inf_Q L = 0")
        raise DegenerateZero("mu(V) = 0, so the infimum of L over the orthant is 0", report=report)
    muV = float(mass)

    B = rs.coordinate_basis
    k = B.shape[1]
    if k == 0:
        # V = {0}: L_{mu|V} is identically 1
        v0 = np.zeros(d)
        lam, iterations = 1.0, 0
    else:
        def objective(c):
            v = B @ c
            return (laplace.laplace_eval(conditioned, v),
                    B.T @ laplace.laplace_grad(conditioned, v),
                    B.T @ laplace.laplace_hess(conditioned, v) @ B)

        lower = np.array([0.0] * len(rs.I) + [-np.inf] * (k - len(rs.I)))
        upper = np.full(k, np.inf)
        c, lam, _, iterations = _projected_newton(objective, np.zeros(k), lower, upper, settings)
        v0 = B @ c
        # coordinates along e_i are exact copies of v0_i
        for j, i in enumerate(rs.I):
            v0[i] = c[j]

    tol_active = settings.active_factor * (1.0 + float(np.linalg.norm(v0)))
    K = tuple(i for i in rs.I if v0[i] > tol_active)
    grad = laplace.laplace_grad(conditioned, v0)
    kkt = _kkt_residual(grad, rs, K)
    drift = tuple(float(m) for m in grad / lam)

    report = MinimizerReport(
        inf_value=muV * lam,
        v0=tuple(float(v) for v in v0),
        lambda_=float(lam),
        muV=muV,
        K=K,
        kkt_residual=kkt,
        attained=rs.well_oriented,
        drift=drift,
        iterations=iterations,
    )
    logger.info(f"inf_Q L = {report.inf_value:.12g} (mu(V) = {muV:.6g}, lambda = {lam:.12g}, K = {K})")
    return report


def minimize_on_box(dist: FiniteDistribution, upper: float,
                    settings: Optional[OptimizerSettings] = None) -> BoxMinimum:
    """Minimize L_mu directly over Q ∩ [0, upper]^d. Values decrease toward inf_Q L as upper grows."""
    if not upper > 0:
        raise ValueError(f"box cap must be positive, got {upper}")
    settings = settings or OptimizerSettings()
    require_valid(dist)
    d = dist.dimension

    def objective(x):
        return laplace.laplace_eval(dist, x), laplace.laplace_grad(dist, x), laplace.laplace_hess(dist, x)

    x, f, _, iterations = _projected_newton(objective, np.zeros(d), np.zeros(d), np.full(d, float(upper)), settings)
    return BoxMinimum(value=float(f), point=tuple(float(v) for v in x), iterations=iterations)


def analyze(dist: FiniteDistribution, settings: Optional[OptimizerSettings] = None,
            rng: Optional[random.Random] = None) -> Tuple[ReducedSupport, MinimizerReport]:
    """Reduced support plus the V+ minimizer. DegenerateZero propagates with its report."""
    rs = build_reduced_support(dist, rng=rng)
    return rs, minimize_on_vplus(dist, rs, settings=settings)


def infimum(dist: FiniteDistribution, settings: Optional[OptimizerSettings] = None) -> float:
    """inf_Q L, 0 in the degenerate case."""
    try:
        return analyze(dist, settings=settings)[1].inf_value
    except DegenerateZero:
        return 0.0


def upper_bound_check(dist: FiniteDistribution, rate: float, report: Optional[MinimizerReport] = None) -> bool:
    """True iff rate <= inf_Q L + 1e-6."""
    bound = report.inf_value if report is not None else infimum(dist)
    ok = rate <= bound + BOUND_SLACK
    if not ok:
        logger.warning(f"rate {rate:.12g} exceeds the bound {bound:.12g}")
    return ok


def tilt_bound(dist: FiniteDistribution, x0) -> float:
    """
    L_mu(x0) for a point x0 of the orthant. Every such value bounds every
    exit rate from above; inf_Q L is the best of them.
    """
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < 0) or not np.all(np.isfinite(x0)):
        raise NotInOrthant(f"tilt point {x0.tolist()} is not in the orthant")
    value = laplace.laplace_eval(dist, x0)
    if math.isnan(value):
        raise Overflow(f"L({x0.tolist()}) is not a number")
    return value
