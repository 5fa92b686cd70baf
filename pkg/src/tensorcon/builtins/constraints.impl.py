"""tensorcon.builtins.constraints -- ConstraintModel implementation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import replace
from typing import Sequence

import numpy as np

import tensorcon
from tensorcon.constraints import (
    AxisConstraint,
    CompatibilityReport,
    ConstraintModel,
    ConstraintSet,
    Domain,
    IntersectionCheck,
)
from tensorcon.errors import ConstraintError, TensorconError
from tensorcon.expr import Expr

logger = logging.getLogger(__name__)

_SAMPLES_PER_AXIS = 7


@tensorcon.impl(ConstraintModel.make_domain)
def make_domain(
    self: ConstraintModel,
    intervals: Sequence[tuple[float, float]],
    names: Sequence[str] | None = None,
) -> Domain:
    """Validation happens in Domain itself."""
    return Domain(tuple(tuple(i) for i in intervals), tuple(names or ()))


@tensorcon.impl(ConstraintModel.add_constraint)
def add_constraint(self: ConstraintModel, constraints: ConstraintSet, c: AxisConstraint) -> ConstraintSet:
    """Insert keeping (point, order) order; sets are never mutated."""
    domain = constraints.domain
    if not 1 <= c.axis <= domain.dimension:
        raise ConstraintError(f"axis {c.axis} outside 1..{domain.dimension}")
    if c.order < 0:
        raise ConstraintError(f"negative derivative order {c.order}")
    if not domain.contains(c.axis, c.point):
        lo, hi = domain.interval(c.axis)
        raise ConstraintError(f"point {c.point} outside [{lo}, {hi}] on axis {c.axis}")
    name = domain.name(c.axis)
    if c.sliced and c.expr.depends_on(name):
        raise ConstraintError(f"sliced constraint on axis {c.axis} still contains '{name}'")
    unknown = c.expr.variables - set(domain.names)
    if unknown:
        raise ConstraintError(f"constraint uses variables outside the domain: {sorted(unknown)}")
    existing = constraints.on_axis(c.axis)
    if any(other.key == c.key for other in existing):
        raise ConstraintError(f"duplicate constraint (p={c.point}, d={c.order}) on axis {c.axis}")
    updated = tuple(sorted((*existing, c), key=lambda item: item.key))
    axes = list(constraints.axes)
    axes[c.axis - 1] = updated
    return replace(constraints, axes=tuple(axes))


@tensorcon.impl(ConstraintModel.from_function)
def from_function(
    self: ConstraintModel,
    domain: Domain,
    specs: Sequence[tuple[int, float, int]],
    c: Expr,
) -> ConstraintSet:
    """Every constraint keeps ``c`` unsliced."""
    result = ConstraintSet(domain)
    for axis, point, order in specs:
        result = self.add_constraint(result, AxisConstraint(axis, float(point), int(order), c))
    return result


@tensorcon.impl(ConstraintModel.slice_of)
def slice_of(self: ConstraintModel, constraints: ConstraintSet, c: AxisConstraint) -> Expr:
    """diff along the axis, then fix the axis coordinate."""
    if c.sliced:
        return c.expr
    name = constraints.domain.name(c.axis)
    return self.exprs.substitute(self.exprs.diff(c.expr, name, c.order), name, c.point)


def _sample_grid(domain: Domain, free_axes: list[int]) -> list[dict[str, float]]:
    axes = [
        np.linspace(*domain.interval(axis), _SAMPLES_PER_AXIS)
        for axis in free_axes
    ]
    names = [domain.name(axis) for axis in free_axes]
    return [dict(zip(names, map(float, values))) for values in itertools.product(*axes)]


@tensorcon.impl(ConstraintModel.validate_compatibility)
def validate_compatibility(
    self: ConstraintModel,
    constraints: ConstraintSet,
    tol: float = 1e-9,
) -> CompatibilityReport:
    """Pairwise cross-operator comparison on a sample grid."""
    domain = constraints.domain
    report = CompatibilityReport(tolerance=tol)
    slices = {id(c): self.slice_of(constraints, c) for c in constraints.all()}
    for j, k in itertools.combinations(range(1, domain.dimension + 1), 2):
        free = [axis for axis in range(1, domain.dimension + 1) if axis not in (j, k)]
        grid = _sample_grid(domain, free)
        name_j, name_k = domain.name(j), domain.name(k)
        for a in constraints.on_axis(j):
            for b in constraints.on_axis(k):
                note = ""
                try:
                    # axis-k operator on A's slice vs axis-j operator on B's slice
                    left = self.exprs.substitute(
                        self.exprs.diff(slices[id(a)], name_k, b.order), name_k, b.point)
                    right = self.exprs.substitute(
                        self.exprs.diff(slices[id(b)], name_j, a.order), name_j, a.point)
                    diff = left - right
                    values = [abs(self.exprs.evaluate(diff, point)) for point in grid]
                except TensorconError as exc:
                    values = [float("inf")] * len(grid)
                    note = str(exc)
                for point, mismatch in zip(grid, values):
                    report.checks.append(IntersectionCheck(a, b, point, float(mismatch), note))
    if not report.passed:
        worst = report.worst
        logger.debug(
            "compatibility failed: %s vs %s mismatch %.3g",
            worst.first.describe(), worst.second.describe(), worst.mismatch,
        )
    return report
