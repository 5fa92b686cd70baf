"""tensorcon.builtins.combos -- Dirichlet/Neumann combinations on the unit square.

Labels: c_x0 = f(x,0), c_0y = f(0,y), c_x1 = f(x,1), c_1y = f(1,y),
cx_0y = f_x(0,y), cx_1y = f_x(1,y), cy_x0 = f_y(x,0), cy_x1 = f_y(x,1).
The x blends cover the x-axis constraints sorted by (point, order), and the
same for y.
"""

from __future__ import annotations

import logging

import tensorcon
from tensorcon.constraints import Domain
from tensorcon.errors import ComboNotTabulatedError
from tensorcon.expr import Expr
from tensorcon.surfaces import UNIT_SQUARE, ComboFlags, ComboTable, SurfaceForms
from tensorcon.tensor import ConstrainedExpression

logger = logging.getLogger(__name__)

_HX = ("1", "1 - 3*x^2 + 2*x^3", "x - 2*x^2 + x^3", "3*x^2 - 2*x^3", "-x^2 + x^3")
_HY = ("1", "1 - 3*y^2 + 2*y^3", "y - 2*y^2 + y^3", "3*y^2 - 2*y^3", "-y^2 + y^3")

_ROWS: tuple[tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]], ...] = (
    (("c_x0", "c_0y"), ("1", "1"), ("1", "1")),
    (("c_0y", "cy_x0"), ("1", "1"), ("1", "y")),
    (("cx_0y", "cy_x0"), ("1", "x"), ("1", "y")),
    (("c_x0", "c_0y", "c_x1"), ("1", "1"), ("1", "1 - y^2", "y^2")),
    (("c_x0", "c_0y", "cy_x1"), ("1", "1"), ("1", "1", "y")),
    (("c_x0", "c_x1", "cx_0y"), ("1", "x"), ("1", "1 - y", "y")),
    (("c_x1", "cx_0y", "cy_x0"), ("1", "x"), ("1", "y - y^2", "y^2")),
    (("c_0y", "cy_x0", "cy_x1"), ("1", "1"), ("1", "y - y^2/2", "y^2/2")),
    (("cx_0y", "cy_x0", "cy_x1"), ("1", "x"), ("1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "c_x1", "c_1y"), ("1", "1 - x", "x"), ("1", "1 - y", "y")),
    (("c_0y", "c_x1", "c_1y", "cy_x0"), ("1", "1 - x", "x"), ("1", "y - y^2", "y^2")),
    (("c_0y", "c_1y", "cy_x0", "cy_x1"), ("1", "1 - x", "x"), ("1", "y - y^2/2", "y^2/2")),
    (("c_x1", "c_1y", "cx_0y", "cy_x0"), ("1", "x - x^2", "x^2"), ("1", "y - y^2", "y^2")),
    (("c_1y", "cx_0y", "cy_x0", "cy_x1"), ("1", "x - x^2", "x^2"), ("1", "y - y^2/2", "y^2/2")),
    (("cx_0y", "cx_1y", "cy_x0", "cy_x1"), ("1", "x - x^2/2", "x^2/2"), ("1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "cy_x0"), ("1", "1"), ("1", "1", "y")),
    (("c_x0", "cx_0y", "cy_x0"), ("1", "x"), ("1", "1", "y")),
    (("c_x0", "c_0y", "c_1y", "cy_x0"), ("1", "1 - x", "x"), ("1", "1", "y")),
    (("c_x0", "c_0y", "c_x1", "cy_x0"), ("1", "1"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_x1", "cx_0y", "cy_x0"), ("1", "x"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_0y", "cy_x0", "cy_x1"), ("1", "1"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "cx_0y", "cy_x0", "cy_x1"), ("1", "x"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "cx_1y", "cy_x0"), ("1", "1", "x"), ("1", "1", "y")),
    (("c_x0", "cx_0y", "cx_1y", "cy_x0"), ("1", "x - x^2/2", "x^2/2"), ("1", "1", "y")),
    (("c_x0", "c_0y", "cx_0y", "cy_x0"), ("1", "1", "x"), ("1", "1", "y")),
    (("c_x0", "c_0y", "c_x1", "cx_0y", "cy_x0"), ("1", "1", "x"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_0y", "cx_0y", "cy_x0", "cy_x1"), ("1", "1", "x"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "c_x1", "c_1y", "cy_x0"), ("1", "1 - x", "x"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_x1", "c_1y", "cx_0y", "cy_x0"), ("1", "x - x^2", "x^2"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_0y", "c_1y", "cy_x0", "cy_x1"), ("1", "1 - x", "x"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_1y", "cx_0y", "cy_x0", "cy_x1"), ("1", "x - x^2", "x^2"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "cx_0y", "cx_1y", "cy_x0", "cy_x1"), ("1", "x - x^2/2", "x^2/2"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "c_x1", "c_1y", "cx_0y", "cy_x0"),
     ("1", "1 - x^2", "x - x^2", "x^2"), ("1", "1 - y^2", "y - y^2", "y^2")),
    (("c_x0", "c_0y", "c_1y", "cx_0y", "cy_x0", "cy_x1"),
     ("1", "1 - x^2", "x - x^2", "x^2"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "cx_0y", "cx_1y", "cy_x0", "cy_x1"),
     ("1", "1", "x - x^2/2", "x^2/2"), ("1", "1", "y - y^2/2", "y^2/2")),
    (("c_x0", "c_0y", "c_x1", "c_1y", "cy_x0", "cy_x1"), ("1", "1 - x", "x"), _HY),
    (("c_x0", "c_x1", "c_1y", "cx_0y", "cy_x0", "cy_x1"), ("1", "-1 + x", "1"), _HY),
    (("c_x0", "c_x1", "cx_0y", "cx_1y", "cy_x0", "cy_x1"), ("1", "x - x^2/2", "x^2/2"), _HY),
    (("c_x0", "c_0y", "c_x1", "cx_0y", "cy_x0", "cy_x1"), ("1", "1", "x"), _HY),
    (("c_x0", "c_0y", "c_x1", "c_1y", "cx_0y", "cy_x0", "cy_x1"), ("1", "1 - x^2", "x - x^2", "x^2"), _HY),
    (("c_x0", "c_0y", "c_x1", "cx_0y", "cx_1y", "cy_x0", "cy_x1"), ("1", "1", "x - x^2/2", "x^2/2"), _HY),
    (("c_x0", "c_0y", "c_x1", "c_1y", "cx_0y", "cx_1y", "cy_x0", "cy_x1"), _HX, _HY),
)

_TABLE: ComboTable = {ComboFlags.of(*labels): (vx, vy) for labels, vx, vy in _ROWS}


@tensorcon.impl(SurfaceForms.tabulated)
def tabulated(self: SurfaceForms) -> ComboTable:
    return dict(_TABLE)


@tensorcon.impl(SurfaceForms.combo_vectors)
def combo_vectors(
    self: SurfaceForms,
    flags: ComboFlags,
    table: ComboTable | None = None,
) -> tuple[tuple[Expr, ...], tuple[Expr, ...]]:
    table = _TABLE if table is None else table
    labels = flags.labels()
    if not labels:
        raise ComboNotTabulatedError("no boundary constraint selected")
    row = table.get(flags)
    if row is None:
        raise ComboNotTabulatedError(f"combination {{{', '.join(labels)}}} is not tabulated")
    vx, vy = row
    return (
        tuple(self.exprs.parse(text, ["x", "y"]) for text in vx),
        tuple(self.exprs.parse(text, ["x", "y"]) for text in vy),
    )


@tensorcon.impl(SurfaceForms.combo_ce)
def combo_ce(
    self: SurfaceForms,
    flags: ComboFlags,
    c: Expr,
    g: Expr,
    table: ComboTable | None = None,
) -> ConstrainedExpression:
    """Tabulated blends wrapped as vectors; M(c) and M(g) come from the engine."""
    vx, vy = self.combo_vectors(flags, table)
    constraints = self.engine.model.from_function(Domain(UNIT_SQUARE, ("x", "y")), flags.specs(), c)
    vectors = (
        self.engine.vector_from_components(constraints, 1, vx),
        self.engine.vector_from_components(constraints, 2, vy),
    )
    logger.debug("combination %s", ",".join(flags.labels()))
    return self.engine.assemble(constraints, g, vectors=vectors)
