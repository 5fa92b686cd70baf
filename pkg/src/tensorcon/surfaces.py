"""tensorcon.surfaces -- Closed-form bivariate constructors and the Dirichlet/Neumann table."""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import TYPE_CHECKING, Mapping, Optional, Sequence

import numpy as np

import tensorcon

if TYPE_CHECKING:
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine
    from tensorcon.tensor import ConstrainedExpression, TensorEngine

Rectangle = tuple[tuple[float, float], tuple[float, float]]
UNIT_SQUARE: Rectangle = ((0.0, 1.0), (0.0, 1.0))

# Tabulated blends per combination: (v(x) component texts, v(y) component texts).
ComboTable = Mapping["ComboFlags", tuple[tuple[str, ...], tuple[str, ...]]]


@dataclass(frozen=True)
class EdgeSlices:
    """Boundary functions of a rectangle [x_i, x_f] x [y_i, y_f].

    Attributes:
        left: c(x_i, y), a function of y.
        right: c(x_f, y).
        bottom: c(x, y_i), a function of x.
        top: c(x, y_f).
        left_dx: c_x(x_i, y), for Hermite data.
        right_dx: c_x(x_f, y).
        bottom_dy: c_y(x, y_i).
        top_dy: c_y(x, y_f).
    """

    left: Expr
    right: Expr
    bottom: Expr
    top: Expr
    left_dx: Optional[Expr] = None
    right_dx: Optional[Expr] = None
    bottom_dy: Optional[Expr] = None
    top_dy: Optional[Expr] = None

    @property
    def has_normals(self) -> bool:
        return None not in (self.left_dx, self.right_dx, self.bottom_dy, self.top_dy)


@dataclass(frozen=True)
class ComboFlags:
    """Which of the eight unit-square boundary constraints are prescribed.

    Attributes:
        c_x0: f(x, 0).
        c_0y: f(0, y).
        c_x1: f(x, 1).
        c_1y: f(1, y).
        cx_0y: f_x(0, y).
        cx_1y: f_x(1, y).
        cy_x0: f_y(x, 0).
        cy_x1: f_y(x, 1).
    """

    c_x0: bool = False
    c_0y: bool = False
    c_x1: bool = False
    c_1y: bool = False
    cx_0y: bool = False
    cx_1y: bool = False
    cy_x0: bool = False
    cy_x1: bool = False

    @classmethod
    def of(cls, *labels: str) -> ComboFlags:
        """Flags from field names, e.g. ``ComboFlags.of("c_x0", "c_0y")``."""
        known = {f.name for f in fields(cls)}
        unknown = set(labels) - known
        if unknown:
            raise ValueError(f"unknown constraint labels {sorted(unknown)}")
        return cls(**{label: True for label in labels})

    def labels(self) -> tuple[str, ...]:
        return tuple(f.name for f in fields(self) if getattr(self, f.name))

    def specs(self) -> list[tuple[int, float, int]]:
        """(axis, point, order) of every set flag."""
        return [FLAG_SPECS[label] for label in self.labels()]


FLAG_SPECS = {
    "c_x0": (2, 0.0, 0),
    "c_0y": (1, 0.0, 0),
    "c_x1": (2, 1.0, 0),
    "c_1y": (1, 1.0, 0),
    "cx_0y": (1, 0.0, 1),
    "cx_1y": (1, 1.0, 1),
    "cy_x0": (2, 0.0, 1),
    "cy_x1": (2, 1.0, 1),
}


@dataclass(frozen=True)
class MixedRow:
    """One line constraint of a mixed bivariate set.

    Attributes:
        axis: 1 for a line x = point, 2 for a line y = point.
        point: Line coordinate.
        order: Derivative order.
        direction: "normal" differentiates across the line (along the
            axis), "tangential" along the line (along the other axis).
    """

    axis: int
    point: float
    order: int = 0
    direction: str = "normal"


class SurfaceForms(tensorcon.Object):
    """Closed-form two-dimensional constrained expressions over variables x and y.

    Attributes:
        exprs: Shared expression engine.
        engine: Tensor engine (combination rows and mixed constraints).
        tolerance: Corner-compatibility tolerance.
    """

    exprs: ExprEngine
    engine: TensorEngine
    tolerance: float

    def edge_slices(self, c: Expr, rect: Rectangle = UNIT_SQUARE, normals: bool = False) -> EdgeSlices:
        """Boundary functions (and optionally normal derivatives) of one global c."""
        ...

    def coons(self, edges: EdgeSlices, corners: Mapping[tuple[int, int], float] | None = None) -> Expr:
        """Coons surface on the unit square.

        (1-x) c(0,y) + x c(1,y) + (1-y) c(x,0) + y c(x,1)
          - (1-x)(1-y) c(0,0) - (1-x) y c(0,1) - x (1-y) c(1,0) - x y c(1,1)

        Args:
            edges: The four boundary functions.
            corners: Optional corner values keyed by (i, j) in {0, 1}^2,
                checked against the boundary functions.

        Raises:
            IncompatibleConstraintsError: Corners disagree beyond tolerance.
        """
        ...

    def toc_dirichlet_rect(self, edges: EdgeSlices, g: Expr, rect: Rectangle = UNIT_SQUARE) -> Expr:
        """Dirichlet constrained expression on a generic rectangle, linear blends."""
        ...

    def multi_grid_ce(
        self,
        x_nodes: Sequence[float],
        y_nodes: Sequence[float],
        x_slices: Sequence[Expr],
        y_slices: Sequence[Expr],
        g: Expr,
        intersections: np.ndarray | None = None,
    ) -> Expr:
        """Constrained expression for a grid of line functions with Lagrange blends.

        Args:
            x_nodes: Coordinates x_k of the lines x = x_k.
            y_nodes: Coordinates y_k of the lines y = y_k.
            x_slices: c(x_k, y), functions of y.
            y_slices: c(x, y_k), functions of x.
            g: Free function.
            intersections: Optional values c(x_i, y_j), checked for compatibility.

        Raises:
            TensorconError: Duplicate nodes or mismatched counts.
            IncompatibleConstraintsError: Lines disagree at an intersection.
        """
        ...

    def hermite_coons(
        self,
        edges: EdgeSlices,
        g: Expr,
        rect: Rectangle = UNIT_SQUARE,
    ) -> Expr:
        """Boolean-sum surface reproducing boundary values and normal derivatives.

        Uses the 5-component cubic Hermite blends
        {1, 2t^3 - 3t^2 + 1, L(t^3 - 2t^2 + t), -2t^3 + 3t^2, L(t^3 - t^2)}
        with t the normalized coordinate and L the interval length.

        Raises:
            TensorconError: Normal-derivative slices missing.
            IncompatibleConstraintsError: Corner values, slopes or twists disagree.
        """
        ...

    def tabulated(self) -> ComboTable:
        """The built-in table of Dirichlet/Neumann combinations on the unit square."""
        ...

    def combo_vectors(
        self,
        flags: ComboFlags,
        table: ComboTable | None = None,
    ) -> tuple[tuple[Expr, ...], tuple[Expr, ...]]:
        """Tabulated (v(x), v(y)) for a combination, verbatim.

        Raises:
            ComboNotTabulatedError: No flag set, or the combination is not in the table.
        """
        ...

    def combo_ce(
        self,
        flags: ComboFlags,
        c: Expr,
        g: Expr,
        table: ComboTable | None = None,
    ) -> ConstrainedExpression:
        """Constrained expression of a tabulated combination, data sliced from one global c."""
        ...

    def mixed_ce(
        self,
        c: Expr,
        rows: Sequence[MixedRow],
        g: Expr,
        rect: Rectangle = UNIT_SQUARE,
    ) -> Expr:
        """Mixed line constraints, normal or tangential, sliced from one global c.

        A tangential row fixes a derivative along its own line; it is enforced
        through the value of c on that line, which implies it.

        Raises:
            SingularSystemError: A blend system cannot be solved.
            ConstraintError: Two rows collapse onto the same line functional.
        """
        ...
