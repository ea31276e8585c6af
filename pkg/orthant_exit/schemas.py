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
from pathlib import Path
from typing import List, Literal, Optional, Union

from pydantic import (BaseModel, ConfigDict, Field, FilePath, StrictFloat, StrictInt, StrictStr, ValidationError,
                      confloat, conint, conlist)

from . import rational as rq
from .distribution import FiniteDistribution, require_valid
from .errors import DimensionMismatch, ParseError
from .polyhedron import ExtendedPolyhedron, StandardPolyhedron

Scalar = Union[StrictInt, StrictFloat, StrictStr]


def _parse(model, doc, what):
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        raise ParseError(f"invalid {what} document: {e}") from e


def read_document(path, what: str = "input"):
    """Load a JSON file, mapping I/O and syntax errors to ParseError."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {what} file {path}: {e}") from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path} is not valid JSON: {e}") from e


def dump(model: BaseModel) -> str:
    """Canonical JSON text: aliases, sorted keys, no None fields."""
    return json.dumps(model.model_dump(mode="json", by_alias=True, exclude_none=True), sort_keys=True, indent=2) + "\n"


def depth_value(value: float) -> Union[float, str]:
    return "inf" if math.isinf(value) else value


#Input schemas
class AtomFile(BaseModel):
    """Schema for one atom; numbers are 'p/q' strings, integers or exactly representable floats"""
    point: conlist(item_type=Scalar, min_length=1)
    weight: Scalar


class DistributionFile(BaseModel):
    """Schema for a distribution file"""
    dimension: conint(gt=0)
    atoms: conlist(item_type=AtomFile, min_length=1)

    @classmethod
    def parse_document(cls, doc) -> "DistributionFile":
        return _parse(cls, doc, "distribution")

    def to_distribution(self) -> FiniteDistribution:
        pairs = [(rq.vector(a.point), rq.to_fraction(a.weight)) for a in self.atoms]
        return require_valid(FiniteDistribution.from_pairs(pairs, dimension=self.dimension))


class PolyhedronFile(BaseModel):
    """Schema for {x >= 0 : sum x_i C_i = b}"""
    columns: conlist(item_type=conlist(item_type=Scalar, min_length=1), min_length=1)
    b: conlist(item_type=Scalar, min_length=1)

    @classmethod
    def parse_document(cls, doc) -> "PolyhedronFile":
        return _parse(cls, doc, "polyhedron")

    def to_polyhedron(self) -> StandardPolyhedron:
        try:
            return StandardPolyhedron(columns=[rq.vector(c) for c in self.columns], b=rq.vector(self.b))
        except DimensionMismatch as e:
            raise ParseError(f"inconsistent polyhedron: {e}") from e


class ExtendedPolyhedronFile(BaseModel):
    """Schema for {x >= 0 : L x = b, phi(x) >= c}; L given by rows"""
    L: conlist(item_type=conlist(item_type=Scalar, min_length=1), min_length=1)
    phi: conlist(item_type=Scalar, min_length=1)
    b: conlist(item_type=Scalar, min_length=1)
    c: Scalar

    @classmethod
    def parse_document(cls, doc) -> "ExtendedPolyhedronFile":
        return _parse(cls, doc, "extended polyhedron")

    def to_polyhedron(self) -> ExtendedPolyhedron:
        try:
            return ExtendedPolyhedron(L=[rq.vector(r) for r in self.L], phi=rq.vector(self.phi),
                                      b=rq.vector(self.b), c=rq.to_fraction(self.c))
        except DimensionMismatch as e:
            raise ParseError(f"inconsistent extended polyhedron: {e}") from e


#Run configuration
class RunConfig(BaseModel):
    """Schema for one command line run"""
    command: Literal["analyze", "rate", "sweep", "poly"]
    dist: Optional[FilePath] = None
    poly: Optional[FilePath] = None
    action: Optional[Literal["minimal", "reduce", "decompose", "vertices", "bound", "extended-reduce"]] = None
    point: Optional[List[StrictStr]] = None
    starts: List[List[StrictStr]] = []
    deltas: Optional[List[StrictStr]] = None
    n: conint(gt=0) = 200
    samples: conint(gt=0) = 10_000
    seed: conint(ge=0) = 0
    engine: Literal["dp", "spectral", "mc", "mc-tilted"] = "dp"
    method: Literal["ratio", "nth_root"] = "ratio"
    trunc: Optional[conint(gt=0)] = None
    tilt: Optional[List[StrictStr]] = None
    tol: Optional[confloat(gt=0)] = None
    threads: conint(gt=0) = 1
    format: Literal["json", "csv"] = "json"
    out: Optional[Path] = None
    metrics_port: Optional[conint(gt=0, lt=65536)] = None

    @classmethod
    def parse_document(cls, doc) -> "RunConfig":
        return _parse(cls, doc, "run configuration")


#Report schemas
class AnalyzeReport(BaseModel):
    """Schema for the analyze command; index sets are 1-based"""
    model_config = ConfigDict(populate_by_name=True)

    well_oriented: bool
    directions: List[List[str]] = Field(alias="tuple")
    admissible: bool
    V_basis: List[List[str]]
    I: List[int]
    I_perp: List[int]
    muV: str
    inf_value: float
    v0: List[float]
    lambda_: float = Field(alias="lambda")
    K: List[int]
    kkt_residual: float
    attained: bool
    degenerate: bool = False


class CurveModel(BaseModel):
    """Schema for a survival curve"""
    engine: str
    horizons: List[int]
    probabilities: List[float]
    stderr: Optional[List[float]] = None
    ess: Optional[List[float]] = None
    truncation: Optional[List[int]] = None
    exact_box: Optional[bool] = None
    samples: Optional[int] = None


class RateReportModel(BaseModel):
    """Schema for one rate estimate"""
    start: List[str]
    engine: str
    method: str
    rate: float
    bound: float
    d_of_x: Union[float, str]
    within_bound: bool
    converged: Optional[bool] = None
    states: Optional[int] = None
    tilt_bound: Optional[float] = None
    curve: Optional[CurveModel] = None


class RateReports(BaseModel):
    """Schema for rate and sweep output"""
    reports: conlist(item_type=RateReportModel, min_length=1)


class RateRow(BaseModel):
    """Schema for one CSV row: engine, start..., n, probability, stderr"""
    engine: str
    start: List[str]
    n: int
    probability: float
    stderr: Optional[float] = None

    def cells(self) -> List[str]:
        stderr = "" if self.stderr is None else repr(self.stderr)
        return [self.engine, *self.start, str(self.n), repr(self.probability), stderr]


class VertexWeight(BaseModel):
    vertex: List[str]
    weight: str


class PolyReport(BaseModel):
    """Schema for the poly command; active sets are 1-based"""
    model_config = ConfigDict(populate_by_name=True)

    action: str
    point: Optional[List[str]] = None
    active_set: Optional[List[int]] = None
    minimal: Optional[bool] = None
    vertex: Optional[bool] = None
    y: Optional[List[str]] = None
    decomposition: Optional[List[VertexWeight]] = None
    vertices: Optional[List[List[str]]] = None
    M: Optional[str] = None
    bound_holds: Optional[bool] = None
