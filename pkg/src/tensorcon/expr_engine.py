"""tensorcon.expr_engine -- ExprEngine declaration."""

from __future__ import annotations

from typing import TYPE_CHECKING, Mapping, Sequence, Union

import numpy as np

import tensorcon

if TYPE_CHECKING:
    from tensorcon.expr import Expr

# A point: variable name -> value. Arrays of a common shape evaluate a batch.
Point = Mapping[str, Union[float, np.ndarray]]


class ExprEngine(tensorcon.Object):
    """Parsing, evaluation, symbolic differentiation and substitution of expressions.

    Every other service holds a reference to one shared engine and reaches
    the expression substrate only through it.
    """

    def parse(self, text: str, variables: Sequence[str] | None = None) -> Expr:
        """Parse expression text into an expression tree.

        Grammar: ``+ -`` bind loosest, then ``* /``, then unary minus, then
        right-associative ``^``. Functions: sin cos tan exp ln sqrt abs and
        the two-argument mod(a, m) with a constant modulus. ``pi`` and ``e``
        are built-in constants.

        Args:
            text: Expression string.
            variables: Axis variable names. When given, only these names are
                accepted, plus ``x1..xn`` as positional aliases and, for
                n <= 3, ``x``, ``y``, ``z`` for axes 1..3. When omitted,
                ``x``, ``y``, ``z`` and ``x<k>`` are accepted as-is.

        Returns:
            The expression tree.

        Raises:
            ExprSyntaxError: Malformed text, with the character position.
            UnknownIdentifierError: An identifier outside the accepted set.
        """
        ...

    def evaluate(self, e: Expr, at: Point) -> float | np.ndarray:
        """Evaluate an expression.

        Args:
            e: Expression tree.
            at: Variable bindings; array values broadcast against each other.

        Returns:
            A float when every binding is scalar, otherwise an array of the
            broadcast shape.

        Raises:
            UnboundVariableError: A variable of ``e`` has no binding.
            EvaluationDomainError: A node left its domain (division by zero,
                ln of a non-positive, a mod jump under differentiation, ...).
        """
        ...

    def diff(self, e: Expr, var: str, order: int = 1) -> Expr:
        """Differentiate symbolically ``order`` times with respect to ``var``.

        ``order == 0`` returns ``e`` itself.
        """
        ...

    def substitute(self, e: Expr, var: str, value: float) -> Expr:
        """Replace ``var`` by a constant; returns ``e`` itself when ``var`` is absent."""
        ...

    def to_text(self, e: Expr) -> str:
        """Print an expression in the grammar accepted by ``parse``."""
        ...
