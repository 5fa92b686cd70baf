"""tensorcon.univariate -- One-axis constrained expressions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

import tensorcon

if TYPE_CHECKING:
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine


@dataclass(frozen=True)
class PointConstraint:
    """``d^order f / dvar^order`` at ``point`` equals ``target``.

    Attributes:
        point: Constraint coordinate.
        order: Derivative order.
        target: Constant or expression in the other variables.
    """

    point: float
    order: int
    target: Union[Expr, float]


@dataclass(frozen=True)
class UnivariateSpec:
    """Inputs of the one-axis construction.

    Attributes:
        variable: Name of the constrained variable.
        constraints: The constraints, one functional each.
        g: Free function.
        support: Support functions p_k (one per constraint); monomials
            ``variable**(k-1)`` when empty.
    """

    variable: str
    constraints: tuple[PointConstraint, ...]
    g: Expr
    support: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class UnivariateResult:
    """A built one-axis constrained expression.

    Attributes:
        expr: f = g + sum(eta_k p_k).
        etas: The eta_k coefficients, expressions in the other variables.
        support: Support functions actually used.
        matrix: Constraint functionals applied to the support functions
            (rows: constraints, columns: support functions).
        condition: 1-norm condition number of ``matrix``.
    """

    expr: Expr
    etas: tuple[Expr, ...]
    support: tuple[Expr, ...]
    matrix: np.ndarray
    condition: float


class UnivariateBuilder(tensorcon.Object):
    """Builds constrained expressions along a single variable.

    Attributes:
        exprs: Shared expression engine.
    """

    exprs: ExprEngine

    def build(self, spec: UnivariateSpec) -> UnivariateResult:
        """Solve for the eta coefficients and assemble f = g + sum(eta_k p_k).

        Each constraint functional applied to f gives one linear equation in
        the eta_k; the system matrix is constant because the support
        functions depend only on the constrained variable.

        Raises:
            SingularSystemError: Reciprocal condition below 1e-12; carries the
                matrix and dependent column and suggests shifted monomials.
                No automatic retry.
            TensorconError: Support count differs from constraint count.
        """
        ...

    def waring(
        self,
        variable: str,
        nodes: Sequence[float],
        targets: Sequence[Union[Expr, float]],
        g: Expr,
    ) -> Expr:
        """Value constraints in the product (Lagrange) form.

        f = g + sum_k (c_k - g(w_k)) prod_{j != k} (x - w_j) / (w_k - w_j)

        Raises:
            TensorconError: Duplicate nodes or mismatched counts.
        """
        ...
