"""tensorcon.builtins.pde -- PdeSolver implementation."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
import scipy.linalg as sl
from numpy.polynomial import chebyshev

import tensorcon
from tensorcon.constraints import Domain
from tensorcon.errors import IncompatibleConstraintsError, RankDeficientError, TensorconError
from tensorcon.expr import ONE, ZERO, Expr, Var, const, mul, polynomial, sub, total
from tensorcon.pde import (
    COLUMN_DROP,
    MAX_ORDER_PER_AXIS,
    RANK_TOLERANCE,
    VERIFY_POINTS,
    LinearSystem,
    PdeProblem,
    PdeSolution,
    PdeSolver,
)
from tensorcon.tensor import ConstrainedExpression

logger = logging.getLogger(__name__)


def _mapped(domain: Domain, axis: int) -> Expr:
    lo, hi = domain.interval(axis)
    return mul(const(2.0 / (hi - lo)), sub(Var(domain.name(axis)), const(0.5 * (lo + hi))))


def _chebyshev(degree: int, t: Expr) -> Expr:
    if degree == 0:
        return ONE
    return polynomial(list(chebyshev.cheb2poly([0.0] * degree + [1.0])), t)


@tensorcon.impl(PdeSolver.make_basis)
def make_basis(self: PdeSolver, domain: Domain, degree: int) -> list[Expr]:
    if domain.dimension != 2:
        raise TensorconError(f"PDE basis needs a two-dimensional domain, got {domain.dimension}")
    if degree < 1:
        raise TensorconError(f"basis degree must be >= 1, got {degree}")
    xhat, yhat = _mapped(domain, 1), _mapped(domain, 2)
    basis = []
    for k in range(degree + 1):
        for a in range(k, -1, -1):
            basis.append(mul(_chebyshev(a, xhat), _chebyshev(k - a, yhat)))
    return basis


def _check_operator(problem: PdeProblem) -> None:
    if not problem.terms:
        raise TensorconError("the operator has no terms")
    for term in problem.terms:
        if len(term.delta) != problem.domain.dimension:
            raise TensorconError(f"operator multi-index {term.delta} does not match the domain")
        if any(d < 0 or d > MAX_ORDER_PER_AXIS for d in term.delta):
            raise TensorconError(f"operator order {term.delta} outside 0..{MAX_ORDER_PER_AXIS} per axis")


def _grid(domain: Domain, points: Sequence[np.ndarray]) -> dict[str, np.ndarray]:
    mesh = np.meshgrid(*points, indexing="ij")
    return {domain.name(axis): m.ravel() for axis, m in enumerate(mesh, start=1)}


def _uniform(domain: Domain) -> dict[str, np.ndarray]:
    return _grid(domain, [np.linspace(*domain.interval(axis), VERIFY_POINTS) for axis in (1, 2)])


def _collocation(domain: Domain, count: int) -> dict[str, np.ndarray]:
    nodes = chebyshev.chebpts2(count)
    axes = []
    for axis in (1, 2):
        lo, hi = domain.interval(axis)
        axes.append(0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes)
    return _grid(domain, axes)


def _apply(self: PdeSolver, problem: PdeProblem, ce: ConstrainedExpression, at, part: int) -> np.ndarray:
    """Operator applied to one part of f: 0 for A, 1 for g - A(g)."""
    n = len(next(iter(at.values())))
    result = np.zeros(n)
    for term in problem.terms:
        coefficient = np.broadcast_to(self.exprs.evaluate(term.coefficient, at), (n,))
        result = result + coefficient * ce.evaluate_parts(at, term.delta)[part]
    return result


def _base(self: PdeSolver, problem: PdeProblem) -> ConstrainedExpression:
    return self.engine.assemble(problem.constraints, ZERO)


@tensorcon.impl(PdeSolver.assemble_system)
def assemble_system(self: PdeSolver, problem: PdeProblem) -> LinearSystem:
    _check_operator(problem)
    domain = problem.domain
    basis = self.make_basis(domain, problem.degree)
    count = problem.grid or math.ceil(math.sqrt(2 * len(basis)))
    if count < 2:
        raise TensorconError(f"collocation grid of {count} points per axis")
    points = _collocation(domain, count)
    sample = _uniform(domain)
    base = _base(self, problem)
    zero_order = (0,) * domain.dimension

    def column(phi: Expr) -> tuple[float, np.ndarray]:
        ce = base.with_free_function(phi)
        projected = float(np.max(np.abs(ce.evaluate_parts(sample, zero_order)[1])))
        return projected, _apply(self, problem, ce, points, 1)

    if self.workers > 1:
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            columns = list(pool.map(column, basis))
    else:
        columns = [column(phi) for phi in basis]

    # g_j - A(g_j) vanishing on the dense sample means A reproduces g_j
    sizes = np.array([size for size, _ in columns])
    largest = sizes.max() if len(sizes) else 0.0
    kept = [j for j, size in enumerate(sizes) if largest > 0.0 and size > COLUMN_DROP * largest]
    dropped = [j for j in range(len(basis)) if j not in kept]
    rows = count * count
    if rows < len(kept):
        raise TensorconError(f"{rows} collocation points for {len(kept)} basis columns")

    matrix = np.column_stack([columns[j][1] for j in kept]) if kept else np.zeros((rows, 0))
    source = np.broadcast_to(self.exprs.evaluate(problem.source, points), (rows,))
    rhs = source - _apply(self, problem, base, points, 0)
    logger.debug(
        "collocation system %d x %d (%d of %d basis functions dropped)",
        rows, len(kept), len(dropped), len(basis),
    )
    return LinearSystem(matrix, rhs, points, basis, kept, dropped, base)


def _coefficients(basis: list[Expr], xi: Sequence[float]) -> Expr:
    return total([mul(const(float(c)), phi) for c, phi in zip(xi, basis) if c != 0.0])


@tensorcon.impl(PdeSolver.solve)
def solve(self: PdeSolver, problem: PdeProblem) -> PdeSolution:
    report = self.engine.model.validate_compatibility(problem.constraints, self.engine.tolerance)
    if not report.passed:
        worst = report.worst
        raise IncompatibleConstraintsError(
            f"boundary data {worst.first.describe()} and {worst.second.describe()} "
            f"disagree by {worst.mismatch:.3g}",
            worst.mismatch,
            ", ".join(f"{k}={v:g}" for k, v in worst.point.items()),
        )

    system = self.assemble_system(problem)
    columns = len(system.kept)
    xi = np.zeros(len(system.basis))
    rank = 0
    if columns:
        q, r, pivots = sl.qr(system.matrix, mode="economic", pivoting=True)
        diagonal = np.abs(np.diag(r))
        rank = int(np.sum(diagonal > RANK_TOLERANCE * diagonal[0])) if diagonal[0] > 0.0 else 0
        if rank < columns:
            raise RankDeficientError(rank, columns)
        solution = np.empty(columns)
        solution[pivots] = sl.solve_triangular(r, q.T @ system.rhs)
        xi[system.kept] = solution

    residual_norm = float(np.linalg.norm(system.matrix @ xi[system.kept] - system.rhs))
    ce = system.base.with_free_function(_coefficients(system.basis, xi))

    domain = problem.domain
    verify = _uniform(domain)
    verification = float(np.max(np.abs(self.residual(problem, ce, verify))))
    boundary = max((item.max_residual for item in self.engine.boundary_residuals(ce)), default=0.0)
    logger.info(
        "solved: rank %d, residual %.3g, verification %.3g, boundary %.3g",
        rank, residual_norm, verification, boundary,
    )
    return PdeSolution(xi, ce, residual_norm, verification, boundary, rank, system.dropped)


@tensorcon.impl(PdeSolver.realize)
def realize(self: PdeSolver, problem: PdeProblem, xi: Sequence[float]) -> ConstrainedExpression:
    basis = self.make_basis(problem.domain, problem.degree)
    if len(xi) != len(basis):
        raise TensorconError(f"{len(xi)} coefficients for {len(basis)} basis functions")
    return _base(self, problem).with_free_function(_coefficients(basis, xi))


@tensorcon.impl(PdeSolver.residual)
def residual(self: PdeSolver, problem: PdeProblem, ce: ConstrainedExpression, at) -> np.ndarray:
    _check_operator(problem)
    at = {name: np.ravel(np.asarray(value, dtype=float)) for name, value in at.items()}
    n = len(next(iter(at.values())))
    total_values = np.zeros(n)
    for term in problem.terms:
        coefficient = np.broadcast_to(self.exprs.evaluate(term.coefficient, at), (n,))
        total_values = total_values + coefficient * np.broadcast_to(ce.evaluate(at, term.delta), (n,))
    return total_values - np.broadcast_to(self.exprs.evaluate(problem.source, at), (n,))
