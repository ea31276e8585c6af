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
Command line front end.

    python -m orthant_exit analyze --dist data/example2.json
    python -m orthant_exit rate --dist data/example1.json --start 1,1 --engine spectral
    python -m orthant_exit sweep --dist data/example3.json --start 2,2 --start 5,5 --engine spectral
    python -m orthant_exit poly reduce --poly data/poly_reduce.json --point 2,2,1

Exit codes: 0 ok, 2 parse error, 3 degenerate infimum, 4 domain error, 5 no convergence.
"""

import argparse
import csv
import io
import logging
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import polyhedron as ph
from . import rational as rq
from .distribution import load_distribution
from .errors import EXIT_OK, DegenerateZero, DimensionMismatch, OrthantExitError, ParseError
from .monitoring import RunMonitor
from .optimizer import OptimizerSettings, minimize_on_vplus, tilt_bound
from .rates import RateContext, RateReport, estimate_rate, rate_sweep, survival_dp
from .reduction import build_reduced_support, check_admissible
from .schemas import (AnalyzeReport, CurveModel, ExtendedPolyhedronFile, PolyhedronFile, PolyReport, RateReportModel,
                      RateReports, RateRow, RunConfig, VertexWeight, depth_value, dump, read_document)

__all__ = ["SEED_ENV", "build_parser", "parse_config", "cmd_analyze", "cmd_rate", "cmd_sweep", "cmd_poly", "main"]

logger = logging.getLogger(__name__)

SEED_ENV = "ORTHANT_EXIT_SEED"


def _split(value: str) -> List[str]:
    parts = [p.strip() for p in value.split(",")]
    if not all(parts):
        raise ParseError(f"malformed comma separated value {value!r}")
    return parts


def _rate_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--dist", required=True, help="distribution JSON file")
    parser.add_argument("--start", action="append", default=[], help="start point 'a,b,..'; repeatable")
    parser.add_argument("--n", type=int, default=200, help="horizon")
    parser.add_argument("--engine", choices=["dp", "spectral", "mc", "mc-tilted"], default="dp")
    parser.add_argument("--method", choices=["ratio", "nth_root"], default="ratio", help="rate extraction")
    parser.add_argument("--samples", type=int, default=10_000, help="Monte Carlo samples")
    parser.add_argument("--seed", type=int, default=None, help=f"Monte Carlo seed (falls back to ${SEED_ENV}, then 0)")
    parser.add_argument("--trunc", type=int, default=None, help="box radius for dp and spectral")
    parser.add_argument("--threads", type=int, default=1, help="Monte Carlo threads; never changes output")
    parser.add_argument("--tilt", default=None,
                        help="tilt point 'a,b,..' for mc-tilted and the tilt bound; write --tilt=-a,b for negative values")
    parser.add_argument("--tol", type=float, default=None, help="optimizer tolerance")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--out", default=None, help="output file (default stdout)")
    parser.add_argument("--metrics-port", type=int, default=None, help="serve prometheus metrics on this port")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orthant_exit", description="Exit rates of random walks from the orthant")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="reduced support and inf_Q L")
    analyze.add_argument("--dist", required=True, help="distribution JSON file")
    analyze.add_argument("--tol", type=float, default=None, help="optimizer tolerance")
    analyze.add_argument("--out", default=None, help="output file (default stdout)")

    _rate_flags(commands.add_parser("rate", help="survival curve and exit rate per start"))
    sweep = commands.add_parser("sweep", help="rates over many starts, ordered by depth")
    _rate_flags(sweep)
    sweep.add_argument("--delta", action="append", default=None, help="shift every start by delta*(1,..,1); repeatable")

    poly = commands.add_parser("poly", help="polyhedron minimality, reduction and vertices")
    poly.add_argument("action", choices=["minimal", "reduce", "decompose", "vertices", "bound", "extended-reduce"])
    poly.add_argument("--poly", required=True, help="polyhedron JSON file")
    poly.add_argument("--point", default=None, help="point 'p/q,..'")
    poly.add_argument("--out", default=None, help="output file (default stdout)")
    return parser


def parse_config(argv: Optional[List[str]] = None, environ=None) -> RunConfig:
    """
    Turn command line arguments into a validated RunConfig.

    Raises:
        ParseError: bad values, missing files or a malformed seed variable.
    """
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    doc = {"command": args.command}
    for key in ("dist", "poly", "action", "n", "samples", "engine", "method", "trunc", "tol", "threads", "format", "out",
                "metrics_port"):
        value = getattr(args, key, None)
        if value is not None:
            doc[key] = value
    if getattr(args, "start", None):
        doc["starts"] = [_split(s) for s in args.start]
    if getattr(args, "point", None):
        doc["point"] = _split(args.point)
    if getattr(args, "tilt", None):
        doc["tilt"] = _split(args.tilt)
    if getattr(args, "delta", None):
        doc["deltas"] = args.delta

    seed = getattr(args, "seed", None)
    if seed is None and environ.get(SEED_ENV):
        try:
            seed = int(environ[SEED_ENV])
        except ValueError as e:
            raise ParseError(f"{SEED_ENV} must be an integer, got {environ[SEED_ENV]!r}") from e
    if seed is not None:
        doc["seed"] = seed

    config = RunConfig.parse_document(doc)
    if config.command in ("rate", "sweep") and not config.starts:
        raise ParseError("at least one --start is required")
    return config


def _settings(config: RunConfig) -> OptimizerSettings:
    return OptimizerSettings(tol=config.tol) if config.tol is not None else OptimizerSettings()


def cmd_analyze(config: RunConfig) -> AnalyzeReport:
    """
    Reduced support, V+ minimizer and inf_Q L of a distribution file.

    Raises:
        DegenerateZero: mu(V) = 0; its report is the AnalyzeReport with inf_value 0.
    """
    dist = load_distribution(config.dist)
    rs = build_reduced_support(dist)
    degenerate = False
    try:
        report = minimize_on_vplus(dist, rs, settings=_settings(config))
    except DegenerateZero as e:
        report, degenerate = e.report, True
    mass = sum((a.weight for a in dist.atoms if rs.V.contains(a.point)), Fraction(0))

    model = AnalyzeReport(
        well_oriented=rs.well_oriented,
        directions=[rq.format_vector(u) for u in rs.directions],
        admissible=check_admissible(dist, rs.directions),
        V_basis=[rq.format_vector(v) for v in rs.V_basis],
        I=[i + 1 for i in rs.I],
        I_perp=[i + 1 for i in rs.I_perp],
        muV=rq.format_fraction(mass),
        inf_value=report.inf_value,
        v0=list(report.v0),
        lambda_=report.lambda_,
        K=[i + 1 for i in report.K],
        kkt_residual=report.kkt_residual,
        attained=report.attained,
        degenerate=degenerate,
    )
    if degenerate:
        raise DegenerateZero("mu(V) = 0, so inf_Q L = 0", report=model)
    return model


def _rate_model(report: RateReport, tilt_value: Optional[float] = None) -> RateReportModel:
    curve = None
    if report.curve is not None:
        c = report.curve
        curve = CurveModel(
            engine=c.engine,
            horizons=list(c.horizons),
            probabilities=list(c.probabilities),
            stderr=list(c.mc_stderr) if c.mc_stderr is not None else None,
            ess=list(c.ess) if c.ess is not None else None,
            truncation=list(c.truncation) if c.truncation is not None else None,
            exact_box=c.exact_box if c.truncation is not None else None,
            samples=c.samples,
        )
    return RateReportModel(
        start=rq.format_vector(report.start),
        engine=report.engine,
        method=report.method,
        rate=report.rate,
        bound=report.bound,
        d_of_x=depth_value(report.d_of_x),
        within_bound=report.within_bound,
        converged=report.converged,
        states=report.states,
        tilt_bound=tilt_value,
        curve=curve,
    )


def _rows(reports: List[RateReport], config: RunConfig, context: RateContext) -> List[RateRow]:
    rows = []
    for report in reports:
        curve = report.curve
        if curve is None:
            # the spectral engine has no curve of its own; emit the DP curve on the same box
            curve = survival_dp(context.dist, report.start, config.n, trunc=config.trunc)
        stderr = curve.mc_stderr or [None] * len(curve.horizons)
        for n, p, s in zip(curve.horizons, curve.probabilities, stderr):
            rows.append(RateRow(engine=curve.engine, start=rq.format_vector(report.start), n=n, probability=p, stderr=s))
    return rows


def _tilt_point(config: RunConfig, context: RateContext) -> Optional[List[float]]:
    if config.tilt is None:
        return None
    x0 = [float(rq.to_fraction(c)) for c in config.tilt]
    if len(x0) != context.dist.dimension:
        raise DimensionMismatch(f"tilt point has {len(x0)} coordinates, expected {context.dist.dimension}")
    return x0


def _engine_options(config: RunConfig, context: RateContext, monitor: Optional[RunMonitor]) -> dict:
    options = dict(trunc=config.trunc, samples=config.samples, seed=config.seed, threads=config.threads,
                   method=config.method)
    x0 = _tilt_point(config, context)
    if x0 is not None:
        options["tilt_at"] = x0
    if monitor is not None:
        options["progress"] = lambda done, total: monitor.progress(done, total, stage="chunks")
    return options


def _tilt_value(config: RunConfig, context: RateContext) -> Optional[float]:
    """L at the tilt point when it lies in the orthant; tilt points outside it only steer mc-tilted."""
    x0 = _tilt_point(config, context)
    if x0 is None:
        return None
    if any(c < 0 for c in x0):
        logger.info(f"tilt point {x0} is outside the orthant, no tilt bound")
        return None
    return tilt_bound(context.dist, x0)


def cmd_rate(config: RunConfig, monitor: Optional[RunMonitor] = None):
    """One RateReport per start, in the order given. Returns (reports, context)."""
    dist = load_distribution(config.dist)
    context = RateContext.build(dist, settings=_settings(config))
    options = _engine_options(config, context, monitor)
    reports = []
    for start in config.starts:
        report = estimate_rate(context, start, engine=config.engine, n_max=config.n, **options)
        if monitor is not None:
            monitor.publish(report)
        reports.append(report)
    return reports, context


def cmd_sweep(config: RunConfig, monitor: Optional[RunMonitor] = None):
    """RateReports over all starts and deltas, ordered by depth. Returns (reports, context)."""
    dist = load_distribution(config.dist)
    context = RateContext.build(dist, settings=_settings(config))
    reports = rate_sweep(dist, config.starts, n_max=config.n, engine=config.engine, context=context,
                         deltas=config.deltas, monitor=monitor, **_engine_options(config, context, monitor))
    return reports, context


def cmd_poly(config: RunConfig) -> PolyReport:
    """Exact polyhedron actions; points and results are printed as 'p/q'."""
    doc = read_document(config.poly, "polyhedron")
    point = rq.vector(config.point) if config.point is not None else None
    if config.action in ("minimal", "reduce", "decompose", "extended-reduce") and point is None:
        raise ParseError(f"poly {config.action} needs --point")
    shown = rq.format_vector(point) if point is not None else None

    if config.action == "extended-reduce":
        EP = ExtendedPolyhedronFile.parse_document(doc).to_polyhedron()
        y = ph.extended_reduce(EP, point)
        M = ph.extended_bound(EP)
        holds = rq.norm1(y) <= M * (rq.norm1(EP.b) + abs(EP.c))
        return PolyReport(action=config.action, point=shown, y=rq.format_vector(y), M=rq.format_fraction(M),
                          bound_holds=holds)

    P = PolyhedronFile.parse_document(doc).to_polyhedron()
    if config.action == "minimal":
        return PolyReport(action=config.action, point=shown, active_set=[i + 1 for i in ph.active_set(P, point)],
                          minimal=ph.is_minimal(P, point), vertex=ph.is_vertex(P, point))
    if config.action == "reduce":
        y = ph.reduce_to_minimal(P, point)
        return PolyReport(action=config.action, point=shown, y=rq.format_vector(y), minimal=ph.is_minimal(P, y))
    if config.action == "decompose":
        parts = ph.decompose_minimal(P, point)
        return PolyReport(action=config.action, point=shown, decomposition=[
            VertexWeight(vertex=rq.format_vector(v), weight=rq.format_fraction(w)) for v, w in parts])
    if config.action == "vertices":
        return PolyReport(action=config.action, vertices=[rq.format_vector(v) for v in ph.enumerate_vertices(P)])

    M = ph.bound_M(P)
    report = PolyReport(action=config.action, M=rq.format_fraction(M))
    if point is not None:
        y = ph.reduce_to_minimal(P, point)
        report.point, report.y = shown, rq.format_vector(y)
        report.bound_holds = rq.norm1(y) <= M * rq.norm1(P.b)
    return report


def render_rates(reports: List[RateReport], config: RunConfig, context: RateContext) -> str:
    if config.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        d = context.dist.dimension
        writer.writerow(["engine", *[f"start_{i + 1}" for i in range(d)], "n", "probability", "stderr"])
        for row in _rows(reports, config, context):
            writer.writerow(row.cells())
        return buffer.getvalue()
    tilt_value = _tilt_value(config, context)
    return dump(RateReports(reports=[_rate_model(r, tilt_value) for r in reports]))


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
        if config.command == "analyze":
            _emit(dump(cmd_analyze(config)), config.out)
        elif config.command == "poly":
            _emit(dump(cmd_poly(config)), config.out)
        else:
            monitor = RunMonitor(port=config.metrics_port) if config.metrics_port is not None else None
            command = cmd_rate if config.command == "rate" else cmd_sweep
            reports, context = command(config, monitor=monitor)
            _emit(render_rates(reports, config, context), config.out)
    except DegenerateZero as e:
        if e.report is not None:
            _emit(dump(e.report), config.out)
        logger.error(str(e))
        return e.exit_code
    except OrthantExitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return EXIT_OK
