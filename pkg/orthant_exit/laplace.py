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
Laplace transform L(z) = sum_i w_i exp(<z, y_i>) of a finite distribution,
its derivatives, and the Cramer tilt.

All evaluation is in floats. Sums are shifted by M = max_i <z, y_i> so that
only exp(M) itself can overflow.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .distribution import Atom, FiniteDistribution, require_valid
from .errors import DimensionMismatch, Overflow

__all__ = ["TiltPoint", "laplace_eval", "log_laplace", "laplace_grad", "laplace_hess", "tilt", "tilt_point"]

logger = logging.getLogger(__name__)

_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class TiltPoint:
    vector: Tuple[float, ...]
    value: float


def _shifted_terms(dist: FiniteDistribution, z):
    """Return (M, terms) with terms_i = w_i exp(<z, y_i> - M)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (dist.dimension,):
        raise DimensionMismatch(f"z has shape {z.shape}, expected ({dist.dimension},)")
    if not np.all(np.isfinite(z)):
        raise Overflow(f"non-finite argument {z}")
    with np.errstate(over="ignore", invalid="ignore"):
        exponents = dist.points @ z
    if not np.all(np.isfinite(exponents)):
        raise Overflow(f"<z, y> leaves the float range at z = {z}")
    shift = float(exponents.max())
    return shift, dist.weights * np.exp(exponents - shift)


def _scale(shift: float, value: float, what: str) -> float:
    if value > 0 and shift + math.log(value) > _LOG_FLOAT_MAX:
        raise Overflow(f"{what} overflows: exponent {shift:.6g}")
    return math.exp(shift) * value


def log_laplace(dist: FiniteDistribution, z) -> float:
    """log L(z); never overflows."""
    shift, terms = _shifted_terms(dist, z)
    return shift + math.log(terms.sum())


def laplace_eval(dist: FiniteDistribution, z) -> float:
    """
    Evaluate L(z) = sum_i w_i exp(<z, y_i>).

    Raises:
        Overflow: the value exceeds the float range.
    """
    shift, terms = _shifted_terms(dist, z)
    return _scale(shift, float(terms.sum()), "L(z)")


def laplace_grad(dist: FiniteDistribution, z) -> np.ndarray:
    """Gradient sum_i w_i y_i exp(<z, y_i>)."""
    shift, terms = _shifted_terms(dist, z)
    g = dist.points.T @ terms
    scale = _scale(shift, 1.0, "grad L(z)")
    return g * scale


def laplace_hess(dist: FiniteDistribution, z) -> np.ndarray:
    """Hessian sum_i w_i y_i y_i^T exp(<z, y_i>); symmetric positive semidefinite."""
    shift, terms = _shifted_terms(dist, z)
    h = (dist.points * terms[:, None]).T @ dist.points
    scale = _scale(shift, 1.0, "hess L(z)")
    return (h + h.T) / 2.0 * scale


def tilt(dist: FiniteDistribution, x0) -> FiniteDistribution:
    """
    Cramer tilt mu_0(dy) = exp(<x0, y>) mu(dy) / L(x0).

    Same support points, float weights normalized to machine precision. The
    drift of the result is grad L(x0) / L(x0). Tilting at 0 leaves the float
    weights of mu unchanged.
    """
    require_valid(dist)
    shift, terms = _shifted_terms(dist, x0)
    weights = terms / terms.sum()
    atoms = tuple(Atom(point=a.point, weight=float(w)) for a, w in zip(dist.atoms, weights))
    logger.debug(f"tilted {len(atoms)} atoms at {np.asarray(x0, dtype=float)}")
    return FiniteDistribution(dimension=dist.dimension, atoms=atoms)


def tilt_point(dist: FiniteDistribution, x0) -> TiltPoint:
    return TiltPoint(vector=tuple(float(c) for c in x0), value=laplace_eval(dist, x0))
