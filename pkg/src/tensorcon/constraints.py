"""tensorcon.constraints -- Domain, axis constraints, and the ConstraintModel declaration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import tensorcon
from tensorcon.errors import DomainSpecError

if TYPE_CHECKING:
    from tensorcon.expr import Expr
    from tensorcon.expr_engine import ExprEngine

MAX_DIMENSION = 4
DEFAULT_TOLERANCE = 1e-9


def default_names(n: int) -> tuple[str, ...]:
    """``x, y, z`` up to three axes, ``x1..xn`` beyond."""
    if n <= 3:
        return ("x", "y", "z")[:n]
    return tuple(f"x{k}" for k in range(1, n + 1))


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box.

    Attributes:
        intervals: Per-axis closed interval (lo, hi) with lo < hi.
        names: Per-axis variable name.
    """

    intervals: tuple[tuple[float, float], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.intervals)
        if not 1 <= n <= MAX_DIMENSION:
            raise DomainSpecError(f"unsupported dimension {n}; expected 1..{MAX_DIMENSION}")
        intervals = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for k, (lo, hi) in enumerate(intervals, start=1):
            if not lo < hi:
                raise DomainSpecError(f"degenerate interval on axis {k}: [{lo}, {hi}]")
        names = tuple(self.names) or default_names(n)
        if len(names) != n:
            raise DomainSpecError(f"{len(names)} names for {n} axes")
        if len(set(names)) != n:
            raise DomainSpecError(f"axis names must be distinct: {names}")
        object.__setattr__(self, "intervals", intervals)
        object.__setattr__(self, "names", names)

    @property
    def dimension(self) -> int:
        return len(self.intervals)

    def name(self, axis: int) -> str:
        return self.names[axis - 1]

    def interval(self, axis: int) -> tuple[float, float]:
        return self.intervals[axis - 1]

    def contains(self, axis: int, value: float, slack: float = 1e-12) -> bool:
        lo, hi = self.interval(axis)
        return lo - slack <= value <= hi + slack


@dataclass(frozen=True)
class AxisConstraint:
    """One boundary constraint: the order-``order`` derivative along ``axis`` at ``point``.

    Attributes:
        axis: 1-based axis index.
        point: Constraint coordinate, inside the axis interval.
        order: Derivative order, >= 0.
        expr: Either a function of all variables (the operator is applied to
            it) or, when ``sliced``, the slice itself, free of the axis variable.
        sliced: Whether ``expr`` is already the slice.
        label: Optional display name.
    """

    axis: int
    point: float
    order: int
    expr: Expr
    sliced: bool = False
    label: str = ""

    @property
    def key(self) -> tuple[float, int]:
        return (self.point, self.order)

    def describe(self) -> str:
        text = f"axis {self.axis}, p={self.point:g}, d={self.order}"
        return f"{self.label} ({text})" if self.label else text


@dataclass(frozen=True)
class ConstraintSet:
    """Per-axis constraint lists over a domain, each kept sorted by (point, order).

    Attributes:
        domain: The domain.
        axes: One tuple of AxisConstraint per axis (possibly empty).
    """

    domain: Domain
    axes: tuple[tuple[AxisConstraint, ...], ...] = ()

    def __post_init__(self) -> None:
        if not self.axes:
            object.__setattr__(self, "axes", tuple(() for _ in self.domain.intervals))

    def on_axis(self, axis: int) -> tuple[AxisConstraint, ...]:
        return self.axes[axis - 1]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def all(self) -> list[AxisConstraint]:
        return [c for axis in self.axes for c in axis]

    def __len__(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class IntersectionCheck:
    """Agreement of two constraints on different axes at one sample point.

    Attributes:
        first: Constraint on the lower axis.
        second: Constraint on the higher axis.
        point: Bindings of the remaining free variables.
        mismatch: Absolute disagreement (inf when evaluation failed).
        note: Evaluation error text, if any.
    """

    first: AxisConstraint
    second: AxisConstraint
    point: dict[str, float]
    mismatch: float
    note: str = ""


@dataclass
class CompatibilityReport:
    """Every intersection check of a constraint set.

    Attributes:
        tolerance: Absolute tolerance applied.
        checks: All checks performed.
    """

    tolerance: float
    checks: list[IntersectionCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.mismatch <= self.tolerance for c in self.checks)

    @property
    def failures(self) -> list[IntersectionCheck]:
        return [c for c in self.checks if not c.mismatch <= self.tolerance]

    @property
    def worst(self) -> IntersectionCheck | None:
        if not self.checks:
            return None
        return max(self.checks, key=lambda c: c.mismatch)


class ConstraintModel(tensorcon.Object):
    """Builds domains and constraint sets and checks cross-axis compatibility.

    Attributes:
        exprs: Shared expression engine.
    """

    exprs: ExprEngine

    def make_domain(
        self,
        intervals: Sequence[tuple[float, float]],
        names: Sequence[str] | None = None,
    ) -> Domain:
        """Create a domain; default names are x, y, z (x1..x4 for n = 4).

        Raises:
            DomainSpecError: Degenerate interval or dimension outside 1..4.
        """
        ...

    def add_constraint(self, constraints: ConstraintSet, c: AxisConstraint) -> ConstraintSet:
        """Return a new set with ``c`` inserted, keeping the axis list sorted by (point, order).

        Raises:
            ConstraintError: Axis out of range, point outside the interval,
                duplicate (point, order) on the axis, or a ``sliced`` expression
                still containing the axis variable.
        """
        ...

    def from_function(
        self,
        domain: Domain,
        specs: Sequence[tuple[int, float, int]],
        c: Expr,
    ) -> ConstraintSet:
        """Build a set whose constraints all slice one global function ``c``.

        Args:
            domain: The domain.
            specs: (axis, point, order) triples.
            c: Global constraint function.
        """
        ...

    def slice_of(self, constraints: ConstraintSet, c: AxisConstraint) -> Expr:
        """The slice of one constraint: ``expr`` itself when sliced, else the boundary operator applied to it."""
        ...

    def validate_compatibility(
        self,
        constraints: ConstraintSet,
        tol: float = DEFAULT_TOLERANCE,
    ) -> CompatibilityReport:
        """Check every pair of constraints on different axes where they intersect.

        For constraints A on axis j and B on axis k, the axis-k operator of B
        applied to A's slice must equal the axis-j operator of A applied to
        B's slice, on a grid of the remaining variables (7 uniform points per
        free axis, endpoints included). Never raises for mismatches; the
        report carries them.
        """
        ...
