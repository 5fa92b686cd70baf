"""tensorcon.pde -- Linear PDEs on rectangles by least squares over the free function."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

import tensorcon

if TYPE_CHECKING:
    from tensorcon.constraints import ConstraintSet, Domain
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine, Point
    from tensorcon.tensor import ConstrainedExpression, TensorEngine

MAX_ORDER_PER_AXIS = 2
COLUMN_DROP = 1e-10
RANK_TOLERANCE = 1e-12
VERIFY_POINTS = 25


@dataclass(frozen=True)
class OperatorTerm:
    """coefficient(x, y) * d^delta f.

    Attributes:
        delta: Derivative order per axis.
        coefficient: Constant or expression in the domain variables.
    """

    delta: tuple[int, ...]
    coefficient: Expr


@dataclass(frozen=True)
class PdeProblem:
    """L[f] = source on a rectangle, boundary data in ``constraints``.

    Attributes:
        constraints: Boundary constraints; their domain is the problem domain.
        terms: The linear operator L as a sum of terms.
        source: Right-hand side s(x, y).
        degree: Basis degree D (a + b <= D).
        grid: Chebyshev-Gauss-Lobatto points per axis; None picks
            ceil(sqrt(2 * basis count)).
    """

    constraints: ConstraintSet
    terms: tuple[OperatorTerm, ...]
    source: Expr
    degree: int
    grid: Optional[int] = None

    @property
    def domain(self) -> Domain:
        return self.constraints.domain


@dataclass
class LinearSystem:
    """Collocation least-squares system  matrix @ xi = rhs.

    Attributes:
        matrix: L[g_j - A(g_j)] at the collocation points, kept columns only.
        rhs: source - L[A(c)] at the collocation points.
        points: Collocation coordinates by variable name (flattened).
        basis: The full basis.
        kept: Basis indices of the matrix columns.
        dropped: Basis indices annihilated by the projection (reproduced by A).
        base: The constrained expression with g = 0.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    points: dict[str, np.ndarray]
    basis: list[Expr]
    kept: list[int]
    dropped: list[int]
    base: ConstrainedExpression


@dataclass
class PdeSolution:
    """Result of ``PdeSolver.solve``.

    Attributes:
        coefficients: xi over the full basis; dropped functions get 0.
        ce: Constrained expression with g = sum(xi_j g_j).
        residual_norm: 2-norm of the PDE residual at the collocation points.
        verification_residual: Max absolute PDE residual on an independent uniform grid.
        boundary_residual: Max boundary-constraint residual of ``ce``.
        rank: Effective rank of the collocation matrix.
        dropped: Basis indices removed before the solve.
    """

    coefficients: np.ndarray
    ce: ConstrainedExpression
    residual_norm: float
    verification_residual: float
    boundary_residual: float
    rank: int
    dropped: list[int] = field(default_factory=list)


class PdeSolver(tensorcon.Object):
    """Solves linear PDEs with boundary conditions embedded in a constrained expression.

    f = A + sum_j xi_j (g_j - A(g_j)) satisfies the boundary data for every
    xi, so only the interior operator enters the least-squares problem.

    Attributes:
        exprs: Shared expression engine.
        engine: Tensor engine.
        workers: Threads used to assemble matrix columns (1 assembles inline).
    """

    exprs: ExprEngine
    engine: TensorEngine
    workers: int

    def make_basis(self, domain: Domain, degree: int) -> list[Expr]:
        """Chebyshev products T_a(x^) T_b(y^), a + b <= degree, ordered by total degree then by descending a.

        x^ and y^ map each interval affinely onto [-1, 1].

        Raises:
            TensorconError: degree < 1 or a domain that is not two-dimensional.
        """
        ...

    def assemble_system(self, problem: PdeProblem) -> LinearSystem:
        """Evaluate every basis column and the right-hand side at the collocation points.

        A basis function is dropped when max |g_j - A(g_j)| over a uniform 25 x 25 sample is at most
        1e-10 times the largest such value, independently of the collocation grid.

        Raises:
            TensorconError: Operator order above 2 on an axis, or fewer points than columns.
        """
        ...

    def solve(self, problem: PdeProblem) -> PdeSolution:
        """Least squares by column-pivoted QR.

        Raises:
            IncompatibleConstraintsError: Boundary data disagrees at corners.
            RankDeficientError: |r_ii| <= 1e-12 |r_00| for some kept column.
        """
        ...

    def realize(self, problem: PdeProblem, xi: Sequence[float]) -> ConstrainedExpression:
        """The constrained expression for an arbitrary coefficient vector over the full basis."""
        ...

    def residual(self, problem: PdeProblem, ce: ConstrainedExpression, at: Point) -> np.ndarray:
        """L[f] - source at the given points."""
        ...
