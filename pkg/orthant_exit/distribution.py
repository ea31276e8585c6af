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

"""Finitely supported probability distributions on R^d and linear subspaces."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Sequence, Tuple, Union

import numpy as np

from . import rational as rq
from .errors import DimensionMismatch, InvalidDistribution, InvalidSubspace, ZeroMass

__all__ = [
    "MAX_DIMENSION", "Atom", "FiniteDistribution", "Subspace", "ValidationReport",
    "validate", "require_valid", "mean", "restrict", "load_distribution",
]

logger = logging.getLogger(__name__)

MAX_DIMENSION = 16
FLOAT_MASS_TOLERANCE = 1e-12

Weight = Union[Fraction, float]


@dataclass(frozen=True)
class Atom:
    """One support point y of the distribution and its mass."""
    point: rq.Vector
    weight: Weight


@dataclass(frozen=True)
class FiniteDistribution:
    """
    A probability measure with finitely many atoms.

    Points are always exact rationals. Weights are exact rationals for user
    supplied distributions and floats for derived ones (Cramer tilts).
    Instances are immutable; use validate() to check the invariants.
    """
    dimension: int
    atoms: Tuple[Atom, ...]

    @classmethod
    def from_pairs(cls, pairs, dimension=None):
        """
        Build a distribution from (point, weight) pairs.

        Args:
            pairs (iterable[(sequence, scalar)]): points and weights. Points and
                non-float weights go through rational.to_fraction; float weights
                are kept as floats (derived distributions).
            dimension (int): ambient dimension. Inferred from the first point if omitted.

        Returns:
            FiniteDistribution
        """
        atoms = []
        for point, weight in pairs:
            point = rq.vector(point)
            weight = weight if isinstance(weight, float) else rq.to_fraction(weight)
            atoms.append(Atom(point=point, weight=weight))
        if dimension is None:
            if not atoms:
                raise InvalidDistribution("cannot infer the dimension of an empty distribution")
            dimension = len(atoms[0].point)
        return cls(dimension=dimension, atoms=tuple(atoms))

    @cached_property
    def lattice_flag(self) -> bool:
        return all(c.denominator == 1 for a in self.atoms for c in a.point)

    @cached_property
    def exact(self) -> bool:
        return all(isinstance(a.weight, Fraction) for a in self.atoms)

    @cached_property
    def points(self) -> np.ndarray:
        """Atom points as a float array of shape (atoms, dimension)."""
        return np.array([[float(c) for c in a.point] for a in self.atoms], dtype=float).reshape(len(self.atoms), self.dimension)

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([float(a.weight) for a in self.atoms], dtype=float)

    def to_json(self) -> dict:
        """JSON document in the distribution file format; exact weights as 'p/q'."""
        atoms = []
        for a in self.atoms:
            weight = rq.format_fraction(a.weight) if isinstance(a.weight, Fraction) else a.weight
            atoms.append({"point": rq.format_vector(a.point), "weight": weight})
        return {"dimension": self.dimension, "atoms": atoms}

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^d given by a rational basis (empty basis = {0})."""
    ambient_dimension: int
    basis: rq.Matrix = ()

    def __post_init__(self):
        if any(len(b) != self.ambient_dimension for b in self.basis):
            raise DimensionMismatch("basis vector dimension differs from ambient dimension")
        if rq.rank(self.basis) != len(self.basis):
            raise InvalidSubspace("basis vectors are linearly dependent")

    @classmethod
    def spanned_by(cls, vectors, dimension: int):
        vectors = [rq.vector(v) for v in vectors]
        reduced, _ = rq.rref(vectors, dimension) if vectors else ((), ())
        return cls(ambient_dimension=dimension, basis=tuple(reduced))

    @classmethod
    def full(cls, dimension: int):
        return cls(ambient_dimension=dimension, basis=tuple(rq.unit(i, dimension) for i in range(dimension)))

    @classmethod
    def zero(cls, dimension: int):
        return cls(ambient_dimension=dimension, basis=())

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def complement_basis(self) -> rq.Matrix:
        """Rational basis of the orthogonal complement."""
        return rq.orthogonal_complement(self.basis, self.ambient_dimension)

    def complement(self) -> "Subspace":
        return Subspace(self.ambient_dimension, self.complement_basis)

    def contains(self, v: Sequence) -> bool:
        """Exact membership: v is orthogonal to every complement basis vector."""
        if len(v) != self.ambient_dimension:
            raise DimensionMismatch(f"vector of length {len(v)} in R^{self.ambient_dimension}")
        return all(rq.dot(c, v) == 0 for c in self.complement_basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        """S1 ∩ S2 = (S1^perp + S2^perp)^perp."""
        rows = list(self.complement_basis) + list(other.complement_basis)
        return Subspace.spanned_by(rq.orthogonal_complement(rows, self.ambient_dimension), self.ambient_dimension)

    def same_as(self, other: "Subspace") -> bool:
        if self.dimension != other.dimension:
            return False
        return rq.rank(list(self.basis) + list(other.basis)) == self.dimension

    def float_basis(self) -> np.ndarray:
        """Basis as columns of a (d, k) float array."""
        return np.array([[float(c) for c in b] for b in self.basis], dtype=float).reshape(self.dimension, self.ambient_dimension).T


@dataclass
class ValidationReport:
    issues: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.valid


def validate(dist: FiniteDistribution) -> ValidationReport:
    """
    Report every violated invariant of dist. A valid distribution yields an empty report.

    Checks: positive dimension (soft cap MAX_DIMENSION), nonempty support,
    point dimensions, positive weights, total mass exactly one (within 1e-12
    for float weights) and pairwise distinct points.
    """
    report = ValidationReport()
    if dist.dimension < 1:
        report.issues.append(f"dimension must be positive, got {dist.dimension}")
    elif dist.dimension > MAX_DIMENSION:
        report.issues.append(f"dimension {dist.dimension} exceeds the cap of {MAX_DIMENSION}")
    if not dist.atoms:
        report.issues.append("distribution has no atoms")
        return report

    for k, atom in enumerate(dist.atoms):
        if len(atom.point) != dist.dimension:
            report.issues.append(f"atom {k} has dimension {len(atom.point)}, expected {dist.dimension}")
        if not atom.weight > 0:
            report.issues.append(f"atom {k} has non-positive weight {atom.weight}")

    total = sum((a.weight for a in dist.atoms), Fraction(0))
    if dist.exact:
        if total != 1:
            report.issues.append(f"total mass is {rq.format_fraction(total)}, not 1")
    elif abs(float(total) - 1.0) > FLOAT_MASS_TOLERANCE:
        report.issues.append(f"total mass is {float(total)!r}, not 1")

    seen = {}
    for k, atom in enumerate(dist.atoms):
        if atom.point in seen:
            report.issues.append(f"atoms {seen[atom.point]} and {k} share the point {rq.format_vector(atom.point)}")
        else:
            seen[atom.point] = k
    return report


def require_valid(dist: FiniteDistribution) -> FiniteDistribution:
    report = validate(dist)
    if not report.valid:
        raise InvalidDistribution("; ".join(report.issues))
    return dist


def mean(dist: FiniteDistribution) -> Tuple:
    """Drift m = sum of w_i y_i, exact for rational weights."""
    require_valid(dist)
    m = [Fraction(0)] * dist.dimension if dist.exact else [0.0] * dist.dimension
    for atom in dist.atoms:
        for j, c in enumerate(atom.point):
            m[j] += atom.weight * c
    return tuple(m)


def restrict(dist: FiniteDistribution, sub: Subspace):
    """
    Conditional distribution mu|sub and the mass mu(sub).

    Returns:
        (FiniteDistribution, mass): atoms lying in sub with weights divided by mass.

    Raises:
        ZeroMass: no atom lies in sub.
    """
    require_valid(dist)
    if sub.ambient_dimension != dist.dimension:
        raise DimensionMismatch("subspace and distribution live in different dimensions")
    kept = [a for a in dist.atoms if sub.contains(a.point)]
    if not kept:
        raise ZeroMass("no atom lies in the subspace")
    mass = sum((a.weight for a in kept), Fraction(0) if dist.exact else 0.0)
    restricted = tuple(Atom(point=a.point, weight=a.weight / mass) for a in kept)
    logger.debug(f"restricted {len(dist.atoms)} atoms to {len(kept)} in a {sub.dimension}-dim subspace, mass {mass}")
    return FiniteDistribution(dimension=dist.dimension, atoms=restricted), mass


def load_distribution(path) -> FiniteDistribution:
    """Read a distribution JSON file and check it. Raises ParseError or InvalidDistribution."""
    from .schemas import DistributionFile, read_document

    return DistributionFile.parse_document(read_document(path, "distribution")).to_distribution()
