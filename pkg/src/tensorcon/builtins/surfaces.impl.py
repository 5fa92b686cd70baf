"""tensorcon.builtins.surfaces -- Closed-form bivariate constructors.

Every form here is v(x)^T [M(c) - M(g)] v(y) + g for some pair of blend
vectors; the M matrices are assembled from line functions the same way the
tensor engine does for two axes (row lines first, then the column operator).
"""

from __future__ import annotations

import logging
from typing import Mapping, Sequence

import numpy as np

import tensorcon
from tensorcon.constraints import AxisConstraint, ConstraintSet, Domain
from tensorcon.errors import ConstraintError, IncompatibleConstraintsError, TensorconError
from tensorcon.expr import ONE, ZERO, Expr, Var, add, const, is_const, mul, neg, power, sub, total
from tensorcon.surfaces import UNIT_SQUARE, EdgeSlices, MixedRow, Rectangle, SurfaceForms

logger = logging.getLogger(__name__)

X, Y = "x", "y"

# A line function: (expression, line coordinate, derivative order).
Line = tuple[Expr, float, int]


def _functional(self: SurfaceForms, e: Expr, name: str, point: float, order: int) -> Expr:
    return self.exprs.substitute(self.exprs.diff(e, name, order), name, point)


def _value(self: SurfaceForms, e: Expr) -> float:
    return self.exprs.evaluate(e, {X: 0.0, Y: 0.0})


def _check_crossings(self: SurfaceForms, x_lines: Sequence[Line], y_lines: Sequence[Line]) -> None:
    """Row functional of every column line against column functional of every row line."""
    for fx, px, dx in x_lines:
        for fy, py, dy in y_lines:
            from_x = _value(self, _functional(self, fx, Y, py, dy))
            from_y = _value(self, _functional(self, fy, X, px, dx))
            mismatch = abs(from_x - from_y)
            if mismatch > self.tolerance:
                where = f"x={px:g} (d={dx}), y={py:g} (d={dy})"
                raise IncompatibleConstraintsError(
                    f"boundary functions disagree by {mismatch:.3g} at {where}", mismatch, where)


def _matrix(self: SurfaceForms, x_lines: Sequence[Line], y_lines: Sequence[Line]) -> list[list[Expr]]:
    top = [ZERO, *(f for f, _, _ in y_lines)]
    rows = [top]
    for f, _, _ in x_lines:
        rows.append([f, *(neg(_functional(self, f, Y, p, d)) for _, p, d in y_lines)])
    return rows


def _lines_of(self: SurfaceForms, g: Expr, name: str, specs: Sequence[tuple[float, int]]) -> list[Line]:
    return [(_functional(self, g, name, p, d), p, d) for p, d in specs]


def _surface(
    self: SurfaceForms,
    x_lines: Sequence[Line],
    y_lines: Sequence[Line],
    vx: Sequence[Expr],
    vy: Sequence[Expr],
    g: Expr,
) -> Expr:
    m_c = _matrix(self, x_lines, y_lines)
    m_g = _matrix(
        self,
        _lines_of(self, g, X, [(p, d) for _, p, d in x_lines]),
        _lines_of(self, g, Y, [(p, d) for _, p, d in y_lines]),
    )
    terms = []
    for i, bx in enumerate(vx):
        for j, by in enumerate(vy):
            entry = sub(m_c[i][j], m_g[i][j])
            if not is_const(entry, 0.0):
                terms.append(mul(entry, mul(bx, by)))
    return total([*terms, g])


def _linear_blends(lo: float, hi: float, name: str) -> list[Expr]:
    v = Var(name)
    return [
        ONE,
        mul(const(1.0 / (lo - hi)), sub(v, const(hi))),
        mul(const(1.0 / (hi - lo)), sub(v, const(lo))),
    ]


def _lagrange_blends(nodes: Sequence[float], name: str) -> list[Expr]:
    v = Var(name)
    blends = [ONE]
    for k, w_k in enumerate(nodes):
        blend: Expr = ONE
        for j, w_j in enumerate(nodes):
            if j != k:
                blend = mul(blend, mul(const(1.0 / (w_k - w_j)), sub(v, const(w_j))))
        blends.append(blend)
    return blends


def _hermite_blends(lo: float, hi: float, name: str) -> list[Expr]:
    length = hi - lo
    t = mul(const(1.0 / length), sub(Var(name), const(lo))) if (lo, hi) != (0.0, 1.0) else Var(name)
    t2, t3 = power(t, const(2.0)), power(t, const(3.0))
    return [
        ONE,
        add(sub(mul(const(2.0), t3), mul(const(3.0), t2)), ONE),
        mul(const(length), add(sub(t3, mul(const(2.0), t2)), t)),
        add(mul(const(-2.0), t3), mul(const(3.0), t2)),
        mul(const(length), sub(t3, t2)),
    ]


def _dirichlet_lines(edges: EdgeSlices, rect: Rectangle) -> tuple[list[Line], list[Line]]:
    (xi, xf), (yi, yf) = rect
    return (
        [(edges.left, xi, 0), (edges.right, xf, 0)],
        [(edges.bottom, yi, 0), (edges.top, yf, 0)],
    )


@tensorcon.impl(SurfaceForms.edge_slices)
def edge_slices(self: SurfaceForms, c: Expr, rect: Rectangle = UNIT_SQUARE, normals: bool = False) -> EdgeSlices:
    (xi, xf), (yi, yf) = rect
    slices = dict(
        left=_functional(self, c, X, xi, 0),
        right=_functional(self, c, X, xf, 0),
        bottom=_functional(self, c, Y, yi, 0),
        top=_functional(self, c, Y, yf, 0),
    )
    if normals:
        slices.update(
            left_dx=_functional(self, c, X, xi, 1),
            right_dx=_functional(self, c, X, xf, 1),
            bottom_dy=_functional(self, c, Y, yi, 1),
            top_dy=_functional(self, c, Y, yf, 1),
        )
    return EdgeSlices(**slices)


@tensorcon.impl(SurfaceForms.coons)
def coons(self: SurfaceForms, edges: EdgeSlices, corners: Mapping[tuple[int, int], float] | None = None) -> Expr:
    """Linear blends on the unit square, no free function."""
    x_lines, y_lines = _dirichlet_lines(edges, UNIT_SQUARE)
    _check_crossings(self, x_lines, y_lines)
    for (i, j), value in (corners or {}).items():
        side = edges.left if i == 0 else edges.right
        mismatch = abs(_value(self, _functional(self, side, Y, float(j), 0)) - value)
        if mismatch > self.tolerance:
            raise IncompatibleConstraintsError(
                f"corner ({i}, {j}) given as {value:g} disagrees by {mismatch:.3g}", mismatch, f"({i}, {j})")
    return _surface(self, x_lines, y_lines, _linear_blends(0.0, 1.0, X), _linear_blends(0.0, 1.0, Y), ZERO)


@tensorcon.impl(SurfaceForms.toc_dirichlet_rect)
def toc_dirichlet_rect(self: SurfaceForms, edges: EdgeSlices, g: Expr, rect: Rectangle = UNIT_SQUARE) -> Expr:
    (xi, xf), (yi, yf) = rect
    x_lines, y_lines = _dirichlet_lines(edges, rect)
    _check_crossings(self, x_lines, y_lines)
    return _surface(self, x_lines, y_lines, _linear_blends(xi, xf, X), _linear_blends(yi, yf, Y), g)


@tensorcon.impl(SurfaceForms.multi_grid_ce)
def multi_grid_ce(
    self: SurfaceForms,
    x_nodes: Sequence[float],
    y_nodes: Sequence[float],
    x_slices: Sequence[Expr],
    y_slices: Sequence[Expr],
    g: Expr,
    intersections: np.ndarray | None = None,
) -> Expr:
    """Lagrange blends in both directions."""
    x_nodes = [float(w) for w in x_nodes]
    y_nodes = [float(w) for w in y_nodes]
    for label, nodes, slices in (("x", x_nodes, x_slices), ("y", y_nodes, y_slices)):
        if len(nodes) != len(slices):
            raise TensorconError(f"{len(nodes)} {label}-nodes for {len(slices)} functions")
        if len(set(nodes)) != len(nodes):
            raise TensorconError(f"duplicate {label}-nodes in {nodes}")
    x_lines = [(f, p, 0) for f, p in zip(x_slices, x_nodes)]
    y_lines = [(f, p, 0) for f, p in zip(y_slices, y_nodes)]
    _check_crossings(self, x_lines, y_lines)
    if intersections is not None:
        given = np.asarray(intersections, dtype=float)
        if given.shape != (len(x_nodes), len(y_nodes)):
            raise TensorconError(f"intersection table of shape {given.shape}")
        for i, (f, _, _) in enumerate(x_lines):
            for j, p in enumerate(y_nodes):
                mismatch = abs(_value(self, _functional(self, f, Y, p, 0)) - given[i, j])
                if mismatch > self.tolerance:
                    where = f"({x_nodes[i]:g}, {p:g})"
                    raise IncompatibleConstraintsError(
                        f"intersection {where} disagrees by {mismatch:.3g}", mismatch, where)
    return _surface(self, x_lines, y_lines, _lagrange_blends(x_nodes, X), _lagrange_blends(y_nodes, Y), g)


@tensorcon.impl(SurfaceForms.hermite_coons)
def hermite_coons(self: SurfaceForms, edges: EdgeSlices, g: Expr, rect: Rectangle = UNIT_SQUARE) -> Expr:
    """Cubic Hermite blends, 5 x 5 matrix."""
    if not edges.has_normals:
        raise TensorconError("Hermite data needs all four normal-derivative functions")
    (xi, xf), (yi, yf) = rect
    x_lines = [(edges.left, xi, 0), (edges.left_dx, xi, 1), (edges.right, xf, 0), (edges.right_dx, xf, 1)]
    y_lines = [(edges.bottom, yi, 0), (edges.bottom_dy, yi, 1), (edges.top, yf, 0), (edges.top_dy, yf, 1)]
    _check_crossings(self, x_lines, y_lines)
    return _surface(self, x_lines, y_lines, _hermite_blends(xi, xf, X), _hermite_blends(yi, yf, Y), g)


@tensorcon.impl(SurfaceForms.mixed_ce)
def mixed_ce(self: SurfaceForms, c: Expr, rows: Sequence[MixedRow], g: Expr, rect: Rectangle = UNIT_SQUARE) -> Expr:
    """Normal rows go to the tensor engine as-is; tangential rows through their trace."""
    model = self.engine.model
    constraints = ConstraintSet(Domain(tuple(rect), (X, Y)))
    for row in rows:
        if row.direction not in ("normal", "tangential"):
            raise ConstraintError(f"unknown direction '{row.direction}'")
        order = row.order
        if row.direction == "tangential" and row.order > 0:
            logger.warning(
                "tangential row (axis %d, p=%g, d=%d) enforced through its value trace",
                row.axis, row.point, row.order,
            )
            order = 0
        try:
            constraints = model.add_constraint(
                constraints, AxisConstraint(row.axis, float(row.point), order, c))
        except ConstraintError as exc:
            raise ConstraintError(f"mixed row {row}: {exc}") from exc
    return self.engine.assemble(constraints, g).as_expr()
