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
Survival probabilities P^x(tau_Q > n) and exit rates.

Engines:
    survival_dp          exact forward convolution on a box of lattice states
    spectral_rate        spectral radius of the substochastic kernel on the reachable states
    mc_survival          direct Monte Carlo
    mc_tilted_survival   Monte Carlo under the Cramer tilt, reweighted

A coordinate whose growth is blocked by the support (some u in Q with
<u, y> <= 0 for every atom and u_i > 0) stays below <u, x> / u_i forever, so
boxes sized from those bounds lose no mass. Other coordinates are capped by
the horizon or by a truncation radius; dropped mass only lowers survival, so
rates from a truncated box are lower bounds.

Usage:
    curve = survival_dp(dist, (5, 5), n_max=200)
    rate = extract_rate(curve)
    report = spectral_rate(dist, (2, 2))
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import laplace, lp
from . import rational as rq
from .distribution import FiniteDistribution, require_valid
from .errors import (DegenerateZero, DimensionMismatch, NoConvergence, NotInOrthant, NotLattice,
                     Overflow, StateExplosion)
from .optimizer import MinimizerReport, OptimizerSettings, minimize_on_vplus, upper_bound_check
from .reduction import ReducedSupport, build_reduced_support, depth
from .sampling import chunk_bounds, ordered_map, stream

__all__ = [
    "DP", "MC", "MC_TILTED", "RATIO", "NTH_ROOT", "SPECTRAL", "ENGINES", "MAX_STATES", "RATE_WINDOW",
    "SpectralSettings", "SurvivalCurve", "RateReport", "RateContext", "ChiConstraint", "TruncationResult",
    "reachable_bounds", "survival_dp", "survival_dp_conditioned", "cramer_survival_dp", "extract_rate",
    "spectral_rate", "mc_survival", "mc_tilted_survival", "converge_truncation", "estimate_rate", "rate_sweep",
]

logger = logging.getLogger(__name__)

DP, MC, MC_TILTED = "DP", "MC", "MC_TILTED"
RATIO, NTH_ROOT, SPECTRAL = "ratio", "nth_root", "spectral"
ENGINES = ("dp", "spectral", "mc", "mc-tilted")

MAX_STATES = 10**7
RATE_WINDOW = 10
TRUNCATION_TOL = 1e-6

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
# float drift of non-lattice atoms must not count as an exit
_ORTHANT_SLACK = 1e-9


@dataclass(frozen=True)
class SpectralSettings:
    tol: float = 1e-10
    max_iter: int = 100_000
    shift: float = 0.25


@dataclass(frozen=True)
class SurvivalCurve:
    """
    P^x(tau_Q > n) for n in horizons.

    truncation is the upper corner of the DP box; exact_box is False when that
    box may have dropped mass. MC curves carry standard errors, and tilted MC
    curves also carry the effective sample size per horizon.
    """
    start: Tuple
    horizons: Tuple[int, ...]
    probabilities: Tuple[float, ...]
    engine: str
    mc_stderr: Optional[Tuple[float, ...]] = None
    truncation: Optional[Tuple[int, ...]] = None
    exact_box: bool = True
    ess: Optional[Tuple[float, ...]] = None
    samples: Optional[int] = None


@dataclass(frozen=True)
class RateReport:
    rate: float
    method: str
    curve: Optional[SurvivalCurve]
    bound: float
    d_of_x: float
    start: Tuple
    engine: str
    within_bound: bool
    converged: Optional[bool] = None
    states: Optional[int] = None


@dataclass(frozen=True)
class RateContext:
    """A distribution with its reduced support and infimum, shared by many rate computations."""
    dist: FiniteDistribution
    rs: ReducedSupport
    report: MinimizerReport

    @classmethod
    def build(cls, dist: FiniteDistribution, settings: Optional[OptimizerSettings] = None):
        rs = build_reduced_support(dist)
        try:
            report = minimize_on_vplus(dist, rs, settings=settings)
        except DegenerateZero as e:
            report = e.report
        return cls(dist=dist, rs=rs, report=report)

    @property
    def bound(self) -> float:
        return self.report.inf_value

    def finish(self, rate: float, method: str, curve, start, engine: str, **extra) -> RateReport:
        return RateReport(
            rate=float(rate),
            method=method,
            curve=curve,
            bound=self.bound,
            d_of_x=depth(self.rs, start),
            start=tuple(start),
            engine=engine,
            within_bound=upper_bound_check(self.dist, rate, self.report),
            **extra,
        )


@dataclass(frozen=True, eq=False)
class ChiConstraint:
    """
    Keep only paths with max_k chi(S_k - center) <= radius, where chi(z) is the
    largest of |z_i| over i in K and the norm of the V2 component of z.
    """
    K: Tuple[int, ...]
    v2_basis: np.ndarray
    center: Tuple[float, ...]
    radius: float

    @classmethod
    def from_context(cls, context: RateContext, radius: float, center: Sequence):
        v2 = context.rs.coordinate_basis[:, len(context.rs.I):]
        return cls(K=context.report.K, v2_basis=v2, center=tuple(float(c) for c in center), radius=float(radius))

    def value(self, positions: np.ndarray) -> np.ndarray:
        z = positions - np.asarray(self.center)
        chi = np.zeros(len(positions))
        if self.K:
            chi = np.maximum(chi, np.abs(z[:, list(self.K)]).max(axis=1))
        if self.v2_basis.shape[1]:
            chi = np.maximum(chi, np.linalg.norm(z @ self.v2_basis, axis=1))
        return chi


@dataclass(frozen=True)
class TruncationResult:
    rate: float
    trunc: int
    converged: bool
    curve: SurvivalCurve


def _orthant_start(x: Sequence, d: int) -> rq.Vector:
    x = rq.vector(x)
    if len(x) != d:
        raise DimensionMismatch(f"start has length {len(x)}, expected {d}")
    if any(c < 0 for c in x):
        raise NotInOrthant(f"start {rq.format_vector(x)} is not in the orthant")
    return x


def _lattice_start(dist: FiniteDistribution, x: Sequence) -> Tuple[int, ...]:
    require_valid(dist)
    if not dist.lattice_flag:
        raise NotLattice("the exact engines need integer atoms")
    x = _orthant_start(x, dist.dimension)
    if any(c.denominator != 1 for c in x):
        raise NotLattice(f"start {rq.format_vector(x)} is not a lattice point")
    return tuple(int(c) for c in x)


def _integer_points(dist: FiniteDistribution) -> List[Tuple[int, ...]]:
    return [tuple(int(c) for c in a.point) for a in dist.atoms]


def reachable_bounds(dist: FiniteDistribution, x: Sequence) -> Tuple[Optional[Fraction], ...]:
    """
    Per coordinate, an exact upper bound on S_n[i] along every trajectory from x
    that stays in Q, or None when the coordinate can grow without bound.

    The bound is min <u, x> over {u >= 0, u_i = 1, <u, y> <= 0 for all atoms};
    <u, S_n> never increases, so S_n[i] <= <u, S_n> <= <u, x>.
    """
    d = dist.dimension
    x = _orthant_start(x, d)
    rows = [a.point for a in dist.atoms]
    bounds = []
    for i in range(d):
        program = lp.LinearProgram(
            objective=[-c for c in x],
            A=[rq.unit(i, d)] + rows,
            rhs=[1] + [0] * len(rows),
            senses=[lp.EQ] + [lp.LE] * len(rows),
        )
        result = lp.solve(program)
        bounds.append(-result.value if result.optimal else None)
    return tuple(bounds)


def _box(dist: FiniteDistribution, x: Tuple[int, ...], n_max: Optional[int], trunc: Optional[int]):
    """Upper corner of the DP box and whether it provably holds every reachable state."""
    bounds = reachable_bounds(dist, x)
    corner, exact = [], True
    for i, bound in enumerate(bounds):
        if bound is not None:
            natural = math.floor(bound)
        elif n_max is not None:
            natural = x[i] + n_max * max(0, max(int(a.point[i]) for a in dist.atoms))
        else:
            natural = None
        if trunc is None:
            if natural is None:
                raise StateExplosion(f"coordinate {i + 1} grows without bound; a truncation radius is required")
            hi = natural
        else:
            hi = max(x[i], trunc if natural is None else min(natural, trunc))
        exact = exact and natural is not None and hi >= natural
        corner.append(hi)
    states = math.prod(c + 1 for c in corner)
    if states > MAX_STATES:
        raise StateExplosion(f"box {corner} holds {states} states, more than {MAX_STATES}")
    return tuple(corner), exact


def _shift_slices(point: Sequence[int], shape: Sequence[int]):
    src, dst = [], []
    for y, size in zip(point, shape):
        if abs(y) >= size:
            return None
        if y >= 0:
            src.append(slice(0, size - y))
            dst.append(slice(y, size))
        else:
            src.append(slice(-y, size))
            dst.append(slice(0, size + y))
    return tuple(src), tuple(dst)


def _forward(points, weights, x, corner, n_max):
    """Yield (n, mass) where mass[s] = P(S_n = s, tau_Q > n) on the box."""
    shape = tuple(c + 1 for c in corner)
    moves = []
    for p, w in zip(points, weights):
        slices = _shift_slices(p, shape)
        if slices is not None:
            moves.append((float(w), slices))
    mass = np.zeros(shape)
    mass[x] = 1.0
    yield 0, mass
    for n in range(1, n_max + 1):
        nxt = np.zeros(shape)
        for w, (src, dst) in moves:
            nxt[dst] += w * mass[src]
        mass = nxt
        yield n, mass


def _check_horizon(n_max: int):
    if n_max < 0:
        raise ValueError(f"horizon must be non-negative, got {n_max}")


def survival_dp(dist: FiniteDistribution, x: Sequence, n_max: int, trunc: Optional[int] = None) -> SurvivalCurve:
    """
    Exact survival probabilities for n = 0..n_max by forward convolution.

    Args:
        dist (FiniteDistribution): lattice distribution.
        x: integer start in Q.
        n_max (int): last horizon.
        trunc (int): optional cap on every coordinate of the box.

    Raises:
        NotLattice: non-integer atoms or start.
        StateExplosion: the box would hold more than MAX_STATES states.
    """
    _check_horizon(n_max)
    x = _lattice_start(dist, x)
    corner, exact = _box(dist, x, n_max, trunc)
    probabilities = [min(1.0, float(m.sum())) for _, m in _forward(_integer_points(dist), dist.weights, x, corner, n_max)]
    logger.debug(f"dp from {x}: box {corner}, exact = {exact}, P(n_max) = {probabilities[-1]:.6g}")
    return SurvivalCurve(start=x, horizons=tuple(range(n_max + 1)), probabilities=tuple(probabilities),
                         engine=DP, truncation=corner, exact_box=exact)


def survival_dp_conditioned(dist: FiniteDistribution, rs: ReducedSupport, x: Sequence, n_max: int,
                            trunc: Optional[int] = None) -> SurvivalCurve:
    """
    P^x(tau_Q > n, every increment in V) = mu(V)^n P^x_{mu|V}(tau_Q > n).

    Uses the same box as survival_dp, so the two curves compare pointwise.
    """
    _check_horizon(n_max)
    x = _lattice_start(dist, x)
    if rs.dimension != dist.dimension:
        raise DimensionMismatch("reduced support and distribution live in different dimensions")
    corner, exact = _box(dist, x, n_max, trunc)
    kept = [(p, float(a.weight)) for p, a in zip(_integer_points(dist), dist.atoms) if rs.V.contains(a.point)]
    points = [p for p, _ in kept]
    weights = [w for _, w in kept]
    probabilities = [min(1.0, float(m.sum())) for _, m in _forward(points, weights, x, corner, n_max)]
    return SurvivalCurve(start=x, horizons=tuple(range(n_max + 1)), probabilities=tuple(probabilities),
                         engine=DP, truncation=corner, exact_box=exact)


def cramer_survival_dp(dist: FiniteDistribution, x0: Sequence, x: Sequence, n_max: int,
                       trunc: Optional[int] = None) -> SurvivalCurve:
    """
    Right-hand side of Cramer's formula computed exactly on the DP box:
    L(x0)^n e^{<x0, x>} E_{mu0}[e^{-<x0, S_n>}; tau_Q > n] with mu0 the tilt at x0.
    Equals survival_dp up to float rounding.
    """
    _check_horizon(n_max)
    x = _lattice_start(dist, x)
    corner, exact = _box(dist, x, n_max, trunc)
    x0 = np.asarray(x0, dtype=float)
    tilted = laplace.tilt(dist, x0)
    log_l = laplace.log_laplace(dist, x0)
    grid = np.indices(tuple(c + 1 for c in corner), dtype=float)
    # -<x0, s - x> on every box state
    phase = -np.tensordot(x0, grid, axes=1) + float(x0 @ np.asarray(x, dtype=float))

    probabilities = []
    for n, mass in _forward(_integer_points(dist), tilted.weights, x, corner, n_max):
        exponent = phase + n * log_l
        live = mass > 0
        if not live.any():
            probabilities.append(0.0)
            continue
        if exponent[live].max() > _LOG_FLOAT_MAX:
            raise Overflow(f"Cramer weight overflows at horizon {n}")
        probabilities.append(float((mass[live] * np.exp(exponent[live])).sum()))
    return SurvivalCurve(start=x, horizons=tuple(range(n_max + 1)), probabilities=tuple(probabilities),
                         engine=DP, truncation=corner, exact_box=exact)


def extract_rate(curve: SurvivalCurve, method: str = RATIO, window: int = RATE_WINDOW) -> float:
    """
    Finite-horizon proxy for the exit rate.

    ratio: (P(n) / P(n - window))^(1 / window) at the last horizon n. An even
        window averages out period-two oscillations.
    nth_root: P(n)^(1 / n).
    """
    probabilities = curve.probabilities
    n = curve.horizons[-1]
    if method == NTH_ROOT:
        if n == 0:
            raise ValueError("the n-th root needs a positive horizon")
        return max(0.0, probabilities[-1]) ** (1.0 / n)
    if method != RATIO:
        raise ValueError(f"unknown rate method {method!r}")
    window = min(window, len(probabilities) - 1)
    if window < 1:
        raise ValueError("the ratio method needs at least two horizons")
    last, previous = probabilities[-1], probabilities[-1 - window]
    if last <= 0 or previous <= 0:
        return 0.0
    return (last / previous) ** (1.0 / window)


def _reachable_kernel(points, weights, x, corner):
    """Substochastic one-step matrix on the states of Q ∩ box reachable from x, in BFS order."""
    index = {x: 0}
    states = [x]
    rows, cols, vals = [], [], []
    k = 0
    while k < len(states):
        s = states[k]
        for p, w in zip(points, weights):
            t = tuple(a + b for a, b in zip(s, p))
            if any(c < 0 or c > hi for c, hi in zip(t, corner)):
                continue
            j = index.get(t)
            if j is None:
                j = len(states)
                if j >= MAX_STATES:
                    raise StateExplosion(f"more than {MAX_STATES} reachable states")
                index[t] = j
                states.append(t)
            rows.append(k)
            cols.append(j)
            vals.append(float(w))
        k += 1
    n = len(states)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _power_radius(block: sparse.csr_matrix, settings: SpectralSettings) -> float:
    """
    Perron root of an irreducible nonnegative block by power iteration on
    block + shift * I, bracketed by the Collatz-Wielandt bounds.
    """
    n = block.shape[0]
    shifted = (block + settings.shift * sparse.identity(n, format="csr")).tocsr()
    v = np.full(n, 1.0 / n)
    lo = hi = 0.0
    for iteration in range(int(settings.max_iter)):
        w = shifted @ v
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= settings.tol * hi:
            logger.debug(f"power iteration on {n} states converged in {iteration + 1} iterations")
            return 0.5 * (lo + hi) - settings.shift
        v = w / w.sum()
    raise NoConvergence(f"power iteration on {n} states did not converge, gap {hi - lo:.3e}",
                        gap=hi - lo, iterations=int(settings.max_iter))


def spectral_rate(dist: FiniteDistribution, x: Sequence, trunc: Optional[int] = None,
                  settings: Optional[SpectralSettings] = None, context: Optional[RateContext] = None) -> RateReport:
    """
    Exit rate as the spectral radius of the one-step kernel restricted to the
    states reachable from x. The radius is the largest Perron root over the
    strongly connected components.

    Exact when every coordinate is bounded along trajectories; otherwise the
    box is capped at trunc and the rate is a lower bound.
    """
    settings = settings or SpectralSettings()
    x = _lattice_start(dist, x)
    context = context or RateContext.build(dist)
    corner, exact = _box(dist, x, None, trunc)
    kernel = _reachable_kernel(_integer_points(dist), dist.weights, x, corner)

    ncomp, labels = csgraph.connected_components(kernel, directed=True, connection="strong")
    order = np.argsort(labels, kind="stable")
    groups = np.split(order, np.cumsum(np.bincount(labels, minlength=ncomp))[:-1])
    rate = 0.0
    for members in groups:
        block = kernel[members][:, members]
        if block.nnz == 0:
            continue
        if len(members) == 1:
            radius = float(block[0, 0])
        else:
            radius = _power_radius(block, settings)
        rate = max(rate, radius)
    logger.info(f"spectral rate from {x}: {rate:.12g} over {kernel.shape[0]} states in {ncomp} components")
    return context.finish(rate, SPECTRAL, None, x, "spectral", converged=exact, states=kernel.shape[0])


def _simulate(points: np.ndarray, weights: np.ndarray, start: np.ndarray, n: int, size: int,
              rng: np.random.Generator, chi: Optional[ChiConstraint] = None,
              on_step: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None) -> np.ndarray:
    """Simulate size paths for n steps and return survivor counts per horizon."""
    positions = np.tile(start, (size, 1))
    alive = np.ones(size, dtype=bool)
    counts = np.zeros(n + 1, dtype=np.int64)
    counts[0] = size
    for t in range(1, n + 1):
        steps = rng.choice(len(weights), size=size, p=weights)
        positions += points[steps]
        alive &= np.all(positions >= -_ORTHANT_SLACK, axis=1)
        if chi is not None:
            alive &= chi.value(positions) <= chi.radius
        counts[t] = int(alive.sum())
        if counts[t] == 0:
            break
        if on_step is not None:
            on_step(t, positions, alive)
    return counts


def mc_survival(dist: FiniteDistribution, x: Sequence, n: int, samples: int, seed: int = 0, threads: int = 1,
                chi: Optional[ChiConstraint] = None, progress=None) -> SurvivalCurve:
    """
    Empirical survival frequencies with binomial standard errors.

    Each path is counted at every horizon it survives, so the curve is
    non-increasing. Output depends on (seed, samples, n) only.
    """
    require_valid(dist)
    _check_horizon(n)
    x = _orthant_start(x, dist.dimension)
    start = np.array([float(c) for c in x])
    points, weights = dist.points, dist.weights
    chunks = chunk_bounds(samples)

    def run(k):
        lo, hi = chunks[k]
        return _simulate(points, weights, start, n, hi - lo, stream(seed, k), chi=chi)

    counts = sum(ordered_map(run, range(len(chunks)), threads=threads, progress=progress))
    p = counts / samples
    stderr = np.sqrt(p * (1.0 - p) / samples)
    logger.info(f"mc from {rq.format_vector(x)}: {samples} samples, P(n={n}) = {p[-1]:.6g}")
    return SurvivalCurve(start=tuple(x), horizons=tuple(range(n + 1)), probabilities=tuple(float(v) for v in p),
                         engine=MC, mc_stderr=tuple(float(s) for s in stderr), samples=samples)


def mc_tilted_survival(dist: FiniteDistribution, x0: Sequence, x: Sequence, n: int, samples: int, seed: int = 0,
                       threads: int = 1, progress=None) -> SurvivalCurve:
    """
    Importance-sampled survival: simulate under the tilt mu0 at x0 and average
    L(x0)^n e^{-<x0, S_n - x>} over surviving paths.

    With x0 = 0 every weight is exactly 1 and the estimate equals mc_survival.

    Raises:
        Overflow: L(x0)^n e^{<x0, x>} leaves the float range.
    """
    require_valid(dist)
    _check_horizon(n)
    x = _orthant_start(x, dist.dimension)
    start = np.array([float(c) for c in x])
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (dist.dimension,):
        raise DimensionMismatch(f"tilt point has shape {x0.shape}, expected ({dist.dimension},)")

    if np.any(x0 != 0):
        weights = laplace.tilt(dist, x0).weights
        log_l = laplace.log_laplace(dist, x0)
    else:
        weights, log_l = dist.weights, 0.0
    if n * log_l + float(x0 @ start) > _LOG_FLOAT_MAX:
        raise Overflow(f"Cramer prefactor overflows at horizon {n}")
    points = dist.points
    chunks = chunk_bounds(samples)

    def run(k):
        lo, hi = chunks[k]
        s1 = np.zeros(n + 1)
        s2 = np.zeros(n + 1)
        s1[0] = s2[0] = hi - lo

        def accumulate(t, positions, alive):
            log_w = t * log_l - (positions[alive] - start) @ x0
            if log_w.size and log_w.max() > _LOG_FLOAT_MAX / 2:
                raise Overflow(f"importance weight overflows at horizon {t}")
            w = np.exp(log_w)
            s1[t] = math.fsum(w)
            s2[t] = math.fsum(w * w)

        _simulate(points, weights, start, n, hi - lo, stream(seed, k), on_step=accumulate)
        return s1, s2

    parts = ordered_map(run, range(len(chunks)), threads=threads, progress=progress)
    total1 = np.array([math.fsum(p[0][t] for p in parts) for t in range(n + 1)])
    total2 = np.array([math.fsum(p[1][t] for p in parts) for t in range(n + 1)])
    p = total1 / samples
    stderr = np.sqrt(np.maximum(total2 / samples - p * p, 0.0) / samples)
    with np.errstate(divide="ignore", invalid="ignore"):
        ess = np.where(total2 > 0, total1 * total1 / np.where(total2 > 0, total2, 1.0), 0.0)
    logger.info(f"tilted mc from {rq.format_vector(x)}: P(n={n}) = {p[-1]:.6g}, ess = {ess[-1]:.1f}")
    return SurvivalCurve(start=tuple(x), horizons=tuple(range(n + 1)), probabilities=tuple(float(v) for v in p),
                         engine=MC_TILTED, mc_stderr=tuple(float(s) for s in stderr),
                         ess=tuple(float(e) for e in ess), samples=samples)


def converge_truncation(dist: FiniteDistribution, x: Sequence, n_max: int, trunc: int, tol: float = TRUNCATION_TOL,
                        max_doublings: int = 8, method: str = RATIO) -> TruncationResult:
    """
    Double the box radius until successive DP rates differ by less than tol.

    The returned rate is a lower bound on the finite-horizon rate; converged is
    True when the box was exact or the doubling test passed.
    """
    if trunc < 1:
        raise ValueError(f"truncation radius must be positive, got {trunc}")
    previous = None
    curve = None
    for _ in range(max_doublings + 1):
        curve = survival_dp(dist, x, n_max, trunc=trunc)
        rate = extract_rate(curve, method)
        if curve.exact_box or (previous is not None and abs(rate - previous) < tol):
            logger.info(f"truncation converged at radius {trunc}: rate {rate:.12g}")
            return TruncationResult(rate=rate, trunc=trunc, converged=True, curve=curve)
        previous = rate
        trunc *= 2
    logger.warning(f"truncation did not converge after {max_doublings} doublings")
    return TruncationResult(rate=previous, trunc=trunc // 2, converged=False, curve=curve)


def estimate_rate(context: RateContext, x: Sequence, engine: str = "dp", n_max: int = 200,
                  trunc: Optional[int] = None, samples: int = 10_000, seed: int = 0, threads: int = 1,
                  method: str = RATIO, tilt_at: Optional[Sequence] = None,
                  spectral: Optional[SpectralSettings] = None, chi: Optional[ChiConstraint] = None,
                  progress=None) -> RateReport:
    """
    One RateReport for start x with the given engine.

    engine is one of ENGINES. mc-tilted tilts at tilt_at, or at the V+ minimizer v0 by default.
    """
    dist = context.dist
    if engine == "spectral":
        return spectral_rate(dist, x, trunc=trunc, settings=spectral, context=context)
    if engine == "dp":
        curve = survival_dp(dist, x, n_max, trunc=trunc)
        converged = curve.exact_box
    elif engine == "mc":
        curve = mc_survival(dist, x, n_max, samples, seed=seed, threads=threads, chi=chi, progress=progress)
        converged = None
    elif engine == "mc-tilted":
        x0 = tilt_at if tilt_at is not None else context.report.v0
        curve = mc_tilted_survival(dist, x0, x, n_max, samples, seed=seed, threads=threads, progress=progress)
        converged = None
    else:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    rate = extract_rate(curve, method)
    return context.finish(rate, method, curve, curve.start, engine, converged=converged)


def rate_sweep(dist: FiniteDistribution, xs: Iterable[Sequence], n_max: int = 200, engine: str = "dp",
               context: Optional[RateContext] = None, deltas: Optional[Sequence] = None, monitor=None,
               **engine_options) -> List[RateReport]:
    """
    RateReports for many starts, ordered by depth d(x) so that convergence
    toward inf_Q L can be read off.

    deltas shifts every start by delta * (1, ..., 1) for each delta given.
    monitor, when given, receives publish(report) and progress(done, total).
    """
    context = context or RateContext.build(dist)
    starts = [rq.vector(x) for x in xs]
    if deltas is not None:
        shifts = [rq.to_fraction(delta) for delta in deltas]
        if any(delta < 0 for delta in shifts):
            raise NotInOrthant("delta shifts must be non-negative")
        starts = [tuple(c + delta for c in x) for x in starts for delta in shifts]

    reports = []
    for k, x in enumerate(starts):
        report = estimate_rate(context, x, engine=engine, n_max=n_max, **engine_options)
        reports.append(report)
        if monitor is not None:
            monitor.publish(report)
            monitor.progress(k + 1, len(starts))
    reports.sort(key=lambda r: r.d_of_x)
    return reports
