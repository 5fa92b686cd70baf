"""tensorcon.tensor -- v vectors, M tensors, and the n-dimensional constrained expression."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

import tensorcon

if TYPE_CHECKING:
    from tensorcon.constraints import ConstraintModel, ConstraintSet, Domain
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine, Point

MAX_PARTIAL_ORDER = 4


@dataclass(frozen=True)
class VVector:
    """Per-axis vector {1, sum_i alpha_i1 h_i, ..., sum_i alpha_il h_i}.

    Attributes:
        axis: 1-based axis.
        name: Axis variable.
        basis: Basis functions h_1..h_l of the axis variable.
        alpha: Inverse of the functional matrix [b_m[h_i]] (l x l).
        components: The l + 1 components; the first is the constant 1.
    """

    axis: int
    name: str
    basis: tuple[Expr, ...]
    alpha: np.ndarray
    components: tuple[Expr, ...]

    @property
    def extent(self) -> int:
        return len(self.components)


@dataclass(frozen=True)
class MTensor:
    """n-dimensional array of expressions; index 0 on every axis is the "1" slot.

    Attributes:
        entries: Object array of Expr, shape (l_1 + 1, ..., l_n + 1).
    """

    entries: np.ndarray

    @property
    def extents(self) -> tuple[int, ...]:
        return self.entries.shape

    def __getitem__(self, index: tuple[int, ...]) -> Expr:
        return self.entries[index]


@dataclass(frozen=True)
class ConstraintResidual:
    """Worst sampled disagreement of one constraint functional.

    Attributes:
        constraint: Description of the constraint.
        axis: Constraint axis.
        point: Constraint coordinate.
        order: Derivative order.
        max_residual: Largest absolute residual over the samples.
        samples: Number of sample points.
    """

    constraint: str
    axis: int
    point: float
    order: int
    max_residual: float
    samples: int


# A slice table: per axis, one slice expression per constraint (sorted like the set).
SliceTable = Sequence[Sequence["Expr"]]
MSource = Union["Expr", SliceTable]


class ConstrainedExpression(tensorcon.Object):
    """f = M(c) . v...v + g - M(g) . v...v, ready for evaluation.

    Every entry of both tensors is built at assembly; derivative entries are
    created on first use under ``lock`` and never change afterwards, so
    concurrent evaluation observes identical values.

    Attributes:
        engine: The tensor engine that assembled it.
        constraints: The constraint set.
        vectors: One VVector per axis.
        m_c: Tensor built from the constraint slices.
        g: Free function.
        m_g: Tensor built from g with the same recipe.
        cache: Derivative entries keyed by (tensor tag, index, multi-index).
        lock: Guards ``cache``.
    """

    engine: TensorEngine
    constraints: ConstraintSet
    vectors: tuple[VVector, ...]
    m_c: MTensor
    g: Expr
    m_g: MTensor
    cache: dict
    lock: threading.Lock

    def evaluate(self, at: Point, delta: Sequence[int] | None = None) -> float | np.ndarray:
        """Evaluate f or one of its partial derivatives.

        Args:
            at: Bindings for every domain variable (scalars or same-shape arrays).
            delta: Multi-index of derivative orders per axis, total <= 4.

        Returns:
            A float for scalar bindings, otherwise an array.
        """
        ...

    def evaluate_parts(
        self,
        at: Point,
        delta: Sequence[int] | None = None,
    ) -> tuple[float | np.ndarray, float | np.ndarray]:
        """Evaluate A = M(c) . v...v and B = g - M(g) . v...v separately."""
        ...

    def with_free_function(self, g: Expr) -> ConstrainedExpression:
        """Same constraints and vectors, new free function (only M(g) is rebuilt)."""
        ...

    def as_expr(self) -> Expr:
        """The full symbolic f as one expression tree."""
        ...


class TensorEngine(tensorcon.Object):
    """n-dimensional constrained-expression machinery.

    Attributes:
        exprs: Shared expression engine.
        model: Constraint model (slicing and compatibility).
        tolerance: Absolute tolerance for compatibility at assembly.
        strict: Whether incompatible constraint data is an error at assembly
            (otherwise it is logged and the lowest-axis slice seeds each entry).
    """

    exprs: ExprEngine
    model: ConstraintModel
    tolerance: float
    strict: bool

    def bc_operator(self, e: Expr, domain: Domain, axis: int, point: float, order: int) -> Expr:
        """Boundary constraint operator: ``order``-th derivative along ``axis``, then fix it at ``point``."""
        ...

    def build_v(
        self,
        constraints: ConstraintSet,
        axis: int,
        basis: Sequence[Expr] | None = None,
    ) -> VVector:
        """Blend vector whose components satisfy the Kronecker property.

        The functional matrix B[m, i] = b_m[h_i] is inverted (alpha = B^-1)
        and component j + 1 is sum_i alpha[i, j] h_i. With the default
        monomials 1, x, ..., a singular matrix triggers one retry with
        x, x^2, ...; an unconstrained axis gives the vector {1}.

        Raises:
            SingularSystemError: The (retried) basis matrix is singular.
        """
        ...

    def vector_from_components(
        self,
        constraints: ConstraintSet,
        axis: int,
        components: Sequence[Expr],
    ) -> VVector:
        """Wrap tabulated blend components (first one must be 1) as a VVector."""
        ...

    def build_m(self, constraints: ConstraintSet, source: MSource) -> MTensor:
        """Build the M tensor.

        Entry 0...0 is 0. An entry with one non-zero index is the slice of
        that constraint. An entry with m >= 2 non-zero indices is
        (-1)**(m+1) times the nested boundary operators, applied in
        ascending-axis order and seeded from the lowest-axis slice when
        ``source`` is a slice table, or applied directly to ``source`` when
        it is a single expression.
        """
        ...

    def slice_table(self, constraints: ConstraintSet) -> list[list[Expr]]:
        """The slice of every constraint, per axis."""
        ...

    def assemble(
        self,
        constraints: ConstraintSet,
        g: Expr,
        vectors: Sequence[VVector] | None = None,
    ) -> ConstrainedExpression:
        """Build every vector and both tensors.

        Args:
            constraints: Constraint set.
            g: Free function.
            vectors: Optional per-axis vectors overriding ``build_v``.

        Raises:
            IncompatibleConstraintsError: Cross-axis data disagrees and
                ``strict`` is set.
        """
        ...

    def eval_f(self, ce: ConstrainedExpression, at: Point) -> float | np.ndarray:
        """Value of f."""
        ...

    def eval_f_partial(
        self,
        ce: ConstrainedExpression,
        at: Point,
        delta: Sequence[int],
    ) -> float | np.ndarray:
        """Partial derivative of f for a multi-index with total order <= 4."""
        ...

    def boundary_residuals(
        self,
        ce: ConstrainedExpression,
        samples: int = 100,
        seed: int = 0,
    ) -> list[ConstraintResidual]:
        """Apply every constraint functional to f at random points of the remaining variables.

        Residuals are absolute differences from the constraint slices.
        """
        ...
