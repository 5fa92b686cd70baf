"""tensorcon.builtins.univariate -- UnivariateBuilder implementation."""

from __future__ import annotations

import logging
from typing import Sequence, Union

import numpy as np

import tensorcon
from tensorcon.errors import TensorconError
from tensorcon.expr import Expr, Var, as_expr, const, mul, power, sub, total
from tensorcon.linalg import invert, reciprocal_condition
from tensorcon.univariate import UnivariateBuilder, UnivariateResult, UnivariateSpec

logger = logging.getLogger(__name__)


def _functional(self: UnivariateBuilder, e: Expr, variable: str, point: float, order: int) -> Expr:
    return self.exprs.substitute(self.exprs.diff(e, variable, order), variable, point)


@tensorcon.impl(UnivariateBuilder.build)
def build(self: UnivariateBuilder, spec: UnivariateSpec) -> UnivariateResult:
    """eta = P^-1 (targets - functionals of g)."""
    x = spec.variable
    count = len(spec.constraints)
    if count == 0:
        raise TensorconError("at least one constraint is required")
    support = spec.support or tuple(power(Var(x), const(k)) for k in range(count))
    if len(support) != count:
        raise TensorconError(f"{len(support)} support functions for {count} constraints")
    for p in support:
        if p.variables - {x}:
            raise TensorconError(f"support function depends on {sorted(p.variables - {x})}")

    matrix = np.array([
        [self.exprs.evaluate(_functional(self, p, x, c.point, c.order), {x: c.point})
         for p in support]
        for c in spec.constraints
    ])
    inverse = invert(
        matrix,
        "support-function",
        f"try shifted monomials p_k = {x}^k" if not spec.support else "",
    )
    residuals = [
        sub(as_expr(c.target), _functional(self, spec.g, x, c.point, c.order))
        for c in spec.constraints
    ]
    etas = tuple(
        total([mul(const(inverse[k, m]), residuals[m]) for m in range(count)])
        for k in range(count)
    )
    expr = total([spec.g, *(mul(eta, p) for eta, p in zip(etas, support))])
    condition = 1.0 / reciprocal_condition(matrix)
    logger.debug("univariate build: %d constraints, cond %.3g", count, condition)
    return UnivariateResult(expr, etas, tuple(support), matrix, condition)


@tensorcon.impl(UnivariateBuilder.waring)
def waring(
    self: UnivariateBuilder,
    variable: str,
    nodes: Sequence[float],
    targets: Sequence[Union[Expr, float]],
    g: Expr,
) -> Expr:
    """Product-form blends, one per node."""
    nodes = [float(w) for w in nodes]
    if len(nodes) != len(targets):
        raise TensorconError(f"{len(nodes)} nodes for {len(targets)} targets")
    if len(set(nodes)) != len(nodes):
        raise TensorconError(f"duplicate nodes in {nodes}")
    x = Var(variable)
    terms = [g]
    for k, (w_k, c_k) in enumerate(zip(nodes, targets)):
        blend: Expr = const(1.0)
        for j, w_j in enumerate(nodes):
            if j != k:
                blend = mul(blend, mul(const(1.0 / (w_k - w_j)), sub(x, const(w_j))))
        residual = sub(as_expr(c_k), self.exprs.substitute(g, variable, w_k))
        terms.append(mul(residual, blend))
    return total(terms)
