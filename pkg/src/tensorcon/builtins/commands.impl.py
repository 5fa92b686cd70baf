"""tensorcon.builtins.commands -- Commands implementation."""

from __future__ import annotations

import csv
import io
import logging
import math
from typing import Sequence

import numpy as np

import tensorcon
from tensorcon.commands import (
    Commands,
    ProblemConfig,
    RunConfig,
    SweepReport,
    SweepRow,
    VerifyReport,
)
from tensorcon.constraints import Domain
from tensorcon.errors import ConfigError, TensorconError
from tensorcon.expr import Expr, Var, add, const, cos, mul, power, sin, total
from tensorcon.pde import PdeProblem
from tensorcon.surfaces import FLAG_SPECS, UNIT_SQUARE, ComboFlags, ComboTable
from tensorcon.tensor import ConstrainedExpression

logger = logging.getLogger(__name__)

_SWEEP_DEGREE = 4
_SWEEP_SAMPLES = 20


def _number(value: float) -> str:
    return format(float(value), ".17g")


def _grid(domain: Domain, counts: Sequence[int]) -> dict[str, np.ndarray]:
    """Uniform grid flattened with axis 1 varying fastest."""
    axes = [np.linspace(*domain.interval(axis), n) for axis, n in enumerate(counts, start=1)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return {domain.name(axis): m.ravel(order="F") for axis, m in enumerate(mesh, start=1)}


def _csv(header: Sequence[str], columns: Sequence[np.ndarray]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([_number(v) for v in row])
    return buffer.getvalue()


def _assemble(self: Commands, problem: ProblemConfig) -> ConstrainedExpression:
    return self.engine.assemble(problem.constraints, problem.free_function)


def _column(value, size: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=float), (size,))


@tensorcon.impl(Commands.cmd_eval)
def cmd_eval(self: Commands, run: RunConfig, problem: ProblemConfig) -> str:
    domain = problem.constraints.domain
    at = _grid(domain, run.resolution(domain.dimension))
    size = len(at[domain.name(1)])
    ce = _assemble(self, problem)
    header = [*domain.names, "f"]
    columns = [*(at[name] for name in domain.names), _column(ce.evaluate(at), size)]
    if run.partial is not None:
        header.append("f_" + "_".join(str(d) for d in run.partial))
        columns.append(_column(ce.evaluate(at, run.partial), size))
    logger.info("evaluated %d grid points", size)
    return _csv(header, columns)


@tensorcon.impl(Commands.cmd_verify)
def cmd_verify(self: Commands, run: RunConfig, problem: ProblemConfig) -> VerifyReport:
    """Residuals use ``run.seed``; intersections use the fixed compatibility grid."""
    tolerance = run.tolerance if run.tolerance is not None else problem.boundary_tolerance
    report = VerifyReport(tolerances={
        "boundary": tolerance,
        "compatibility": problem.compatibility_tolerance,
    })
    ce = _assemble(self, problem)
    for item in self.engine.boundary_residuals(ce, problem.samples, run.seed):
        report.constraints.append({
            "constraint": item.constraint,
            "axis": item.axis,
            "point": item.point,
            "order": item.order,
            "samples": item.samples,
            "max_residual": item.max_residual,
            "passed": item.max_residual <= tolerance,
        })

    compatibility = self.model.validate_compatibility(problem.constraints, problem.compatibility_tolerance)
    pairs: dict[tuple[int, int], dict] = {}
    for check in compatibility.checks:
        key = (id(check.first), id(check.second))
        record = pairs.get(key)
        if record is None or check.mismatch > record["max_mismatch"]:
            pairs[key] = {
                "first": check.first.describe(),
                "second": check.second.describe(),
                "max_mismatch": check.mismatch,
                "at": dict(check.point),
                "note": check.note,
                "passed": check.mismatch <= problem.compatibility_tolerance,
            }
    report.compatibility.extend(pairs.values())
    logger.info("verify: %s", "pass" if report.passed else "FAIL")
    return report


@tensorcon.impl(Commands.cmd_solve_pde)
def cmd_solve_pde(self: Commands, run: RunConfig, problem: ProblemConfig) -> str:
    spec = problem.pde
    if spec is None:
        raise ConfigError("config has no 'pde' block", problem.path)
    pde_problem = PdeProblem(problem.constraints, spec.terms, spec.source, spec.degree, spec.grid)
    solution = self.pde.solve(pde_problem)
    domain = problem.constraints.domain
    at = _grid(domain, run.resolution(domain.dimension))
    size = len(at[domain.name(1)])
    values = _column(solution.ce.evaluate(at), size)
    residual = _column(self.pde.residual(pde_problem, solution.ce, at), size)
    logger.info(
        "pde: residual norm %.3g, verification %.3g, boundary %.3g, %d basis functions dropped",
        solution.residual_norm, solution.verification_residual,
        solution.boundary_residual, len(solution.dropped),
    )
    return _csv([*domain.names, "f", "residual"], [*(at[name] for name in domain.names), values, residual])


def _random_polynomial(rng: np.random.Generator, degree: int = _SWEEP_DEGREE) -> Expr:
    """Degree <= ``degree`` in each variable, coefficients in [-1, 1]."""
    x, y = Var("x"), Var("y")
    terms = []
    for i in range(degree + 1):
        for j in range(degree + 1):
            term: Expr = const(float(rng.uniform(-1.0, 1.0)))
            if i:
                term = mul(term, power(x, const(i)))
            if j:
                term = mul(term, power(y, const(j)))
            terms.append(term)
    return total(terms)


def _random_perturbation(rng: np.random.Generator) -> Expr:
    """Polynomial plus sin(a x + b) cos(c y + d), frequencies in [3, 6].

    The wave is not reproduced by any blend of the table, so every
    unprescribed functional of g - A(g) changes.
    """
    a, c = rng.uniform(3.0, 6.0, 2)
    b, d = rng.uniform(0.0, 2.0 * math.pi, 2)
    wave = mul(sin(add(mul(const(float(a)), Var("x")), const(float(b)))),
               cos(add(mul(const(float(c)), Var("y")), const(float(d)))))
    return add(_random_polynomial(rng), wave)


def _line_points(rng: np.random.Generator, axis: int, point: float) -> dict[str, np.ndarray]:
    free = rng.uniform(*UNIT_SQUARE[0], _SWEEP_SAMPLES)
    line = np.full(_SWEEP_SAMPLES, point)
    return {"x": line, "y": free} if axis == 1 else {"x": free, "y": line}


def _sweep_row(
    self: Commands,
    index: int,
    flags: ComboFlags,
    table: ComboTable,
    rng: np.random.Generator,
    seed: int,
) -> SweepRow:
    c, g = _random_polynomial(rng), _random_polynomial(rng)
    perturbation = _random_perturbation(rng)
    labels = flags.labels()
    try:
        ce = self.surfaces.combo_ce(flags, c, g, table)
        residual = max(item.max_residual for item in self.engine.boundary_residuals(ce, _SWEEP_SAMPLES, seed))
        moved = ce.with_free_function(g + perturbation)
        sensitivity = math.inf
        for label, (axis, point, order) in FLAG_SPECS.items():
            if label in labels:
                continue
            at = _line_points(rng, axis, point)
            delta = (order, 0) if axis == 1 else (0, order)
            change = np.max(np.abs(moved.evaluate(at, delta) - ce.evaluate(at, delta)))
            sensitivity = min(sensitivity, float(change))
    except TensorconError as exc:
        return SweepRow(index, labels, math.inf, 0.0, str(exc))
    return SweepRow(index, labels, residual, sensitivity)


@tensorcon.impl(Commands.cmd_table_sweep)
def cmd_table_sweep(self: Commands, seed: int = 0, table: ComboTable | None = None) -> SweepReport:
    table = self.surfaces.tabulated() if table is None else table
    rng = np.random.default_rng(seed)
    report = SweepReport(seed)
    for index, flags in enumerate(table, start=1):
        row = _sweep_row(self, index, flags, table, rng, seed)
        if not row.passed:
            logger.warning("row %d {%s} failed", index, ",".join(row.labels))
        report.rows.append(row)
    return report
