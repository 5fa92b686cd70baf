"""tensorcon.builtins.tensor -- TensorEngine implementation."""

from __future__ import annotations

import logging
import threading
from typing import Sequence

import numpy as np

import tensorcon
from tensorcon.constraints import ConstraintSet, Domain
from tensorcon.errors import (
    IncompatibleConstraintsError,
    SingularSystemError,
    TensorconError,
)
from tensorcon.expr import ONE, ZERO, Expr, Var, const, is_const, mul, neg, power, total
from tensorcon.linalg import invert
from tensorcon.tensor import (
    MAX_PARTIAL_ORDER,
    ConstrainedExpression,
    ConstraintResidual,
    MSource,
    MTensor,
    TensorEngine,
    VVector,
)

logger = logging.getLogger(__name__)


@tensorcon.impl(TensorEngine.bc_operator)
def bc_operator(self: TensorEngine, e: Expr, domain: Domain, axis: int, point: float, order: int) -> Expr:
    """substitute(diff(e, x_k, d), x_k, p)."""
    if order < 0:
        raise TensorconError(f"negative derivative order {order}")
    name = domain.name(axis)
    return self.exprs.substitute(self.exprs.diff(e, name, order), name, point)


def _monomials(name: str, start: int, count: int) -> list[Expr]:
    return [power(Var(name), const(k)) for k in range(start, start + count)]


def _functional_matrix(self: TensorEngine, constraints: ConstraintSet, axis: int, basis: Sequence[Expr]) -> np.ndarray:
    domain = constraints.domain
    name = domain.name(axis)
    return np.array([
        [
            self.exprs.evaluate(self.bc_operator(h, domain, axis, c.point, c.order), {name: c.point})
            for h in basis
        ]
        for c in constraints.on_axis(axis)
    ])


def _vector(axis: int, name: str, basis: Sequence[Expr], alpha: np.ndarray) -> VVector:
    size = len(basis)
    components = [ONE]
    for j in range(size):
        components.append(total([
            mul(const(alpha[i, j]), basis[i]) for i in range(size) if alpha[i, j] != 0.0
        ]))
    return VVector(axis, name, tuple(basis), alpha, tuple(components))


@tensorcon.impl(TensorEngine.build_v)
def build_v(
    self: TensorEngine,
    constraints: ConstraintSet,
    axis: int,
    basis: Sequence[Expr] | None = None,
) -> VVector:
    """alpha = inverse of [b_m[h_i]], one retry with shifted monomials."""
    name = constraints.domain.name(axis)
    count = len(constraints.on_axis(axis))
    if count == 0:
        return VVector(axis, name, (), np.zeros((0, 0)), (ONE,))

    if basis is not None:
        basis = list(basis)
        if len(basis) != count:
            raise TensorconError(f"{len(basis)} basis functions for {count} constraints on axis {axis}")
        for h in basis:
            if h.variables - {name}:
                raise TensorconError(f"basis function for axis {axis} depends on {sorted(h.variables - {name})}")
        alpha = invert(_functional_matrix(self, constraints, axis, basis), f"axis-{axis} basis")
        return _vector(axis, name, basis, alpha)

    basis = _monomials(name, 0, count)
    try:
        alpha = invert(_functional_matrix(self, constraints, axis, basis), f"axis-{axis} basis")
    except SingularSystemError as exc:
        logger.debug("axis %d: monomial basis singular (column %d), retrying shifted", axis, exc.column)
        basis = _monomials(name, 1, count)
        alpha = invert(
            _functional_matrix(self, constraints, axis, basis),
            f"axis-{axis} shifted basis",
            "supply an explicit basis",
        )
    return _vector(axis, name, basis, alpha)


@tensorcon.impl(TensorEngine.vector_from_components)
def vector_from_components(
    self: TensorEngine,
    constraints: ConstraintSet,
    axis: int,
    components: Sequence[Expr],
) -> VVector:
    """Tabulated blends: identity alpha over the blends themselves."""
    name = constraints.domain.name(axis)
    components = tuple(components)
    if not components or not is_const(components[0], 1.0):
        raise TensorconError(f"first component of the axis-{axis} vector must be 1")
    count = len(components) - 1
    if count != len(constraints.on_axis(axis)):
        raise TensorconError(
            f"axis {axis}: {count} blends for {len(constraints.on_axis(axis))} constraints")
    return VVector(axis, name, components[1:], np.eye(count), components)


@tensorcon.impl(TensorEngine.slice_table)
def slice_table(self: TensorEngine, constraints: ConstraintSet) -> list[list[Expr]]:
    return [
        [self.model.slice_of(constraints, c) for c in constraints.on_axis(axis)]
        for axis in range(1, constraints.domain.dimension + 1)
    ]


@tensorcon.impl(TensorEngine.build_m)
def build_m(self: TensorEngine, constraints: ConstraintSet, source: MSource) -> MTensor:
    """Entries in lexicographic order; each m >= 2 entry extends the one without its highest axis."""
    domain = constraints.domain
    extents = tuple(count + 1 for count in constraints.counts)
    single = isinstance(source, Expr)
    entries = np.empty(extents, dtype=object)
    nested: dict[tuple[int, ...], Expr] = {}
    for index in np.ndindex(*extents):
        active = [k for k, i in enumerate(index) if i]
        if not active:
            entries[index] = ZERO
            continue
        last = active[-1]
        c = constraints.axes[last][index[last] - 1]
        if len(active) == 1:
            if single:
                value = self.bc_operator(source, domain, last + 1, c.point, c.order)
            else:
                value = source[last][index[last] - 1]
        else:
            seed = tuple(0 if k == last else i for k, i in enumerate(index))
            value = self.bc_operator(nested[seed], domain, last + 1, c.point, c.order)
        nested[index] = value
        entries[index] = neg(value) if len(active) % 2 == 0 else value
    return MTensor(entries)


@tensorcon.impl(TensorEngine.assemble)
def assemble(
    self: TensorEngine,
    constraints: ConstraintSet,
    g: Expr,
    vectors: Sequence[VVector] | None = None,
) -> ConstrainedExpression:
    """Compatibility check, vectors, then both tensors."""
    if constraints.domain.dimension > 1 and len(constraints):
        report = self.model.validate_compatibility(constraints, self.tolerance)
        if not report.passed:
            worst = report.worst
            where = ", ".join(f"{k}={v:g}" for k, v in worst.point.items())
            message = (
                f"constraints {worst.first.describe()} and {worst.second.describe()} "
                f"disagree by {worst.mismatch:.3g}" + (f" at {where}" if where else "")
            )
            if self.strict:
                raise IncompatibleConstraintsError(message, worst.mismatch, where)
            logger.warning("%s; seeding from the lower-axis slice", message)

    dimension = constraints.domain.dimension
    if vectors is None:
        vectors = [self.build_v(constraints, axis) for axis in range(1, dimension + 1)]
    vectors = tuple(vectors)
    if len(vectors) != dimension:
        raise TensorconError(f"{len(vectors)} vectors for {dimension} axes")
    for axis, (v, count) in enumerate(zip(vectors, constraints.counts), start=1):
        if v.extent != count + 1:
            raise TensorconError(f"axis {axis}: vector of length {v.extent} for {count} constraints")

    m_c = self.build_m(constraints, self.slice_table(constraints))
    m_g = self.build_m(constraints, g)
    logger.debug("assembled tensors of extents %s", m_c.extents)
    return ConstrainedExpression(
        engine=self,
        constraints=constraints,
        vectors=vectors,
        m_c=m_c,
        g=g,
        m_g=m_g,
        cache={},
        lock=threading.Lock(),
    )


@tensorcon.impl(TensorEngine.eval_f)
def eval_f(self: TensorEngine, ce: ConstrainedExpression, at) -> float | np.ndarray:
    return ce.evaluate(at)


@tensorcon.impl(TensorEngine.eval_f_partial)
def eval_f_partial(
    self: TensorEngine,
    ce: ConstrainedExpression,
    at,
    delta: Sequence[int],
) -> float | np.ndarray:
    if sum(delta) > MAX_PARTIAL_ORDER:
        raise TensorconError(f"total derivative order {sum(delta)} exceeds {MAX_PARTIAL_ORDER}")
    return ce.evaluate(at, delta)


@tensorcon.impl(TensorEngine.boundary_residuals)
def boundary_residuals(
    self: TensorEngine,
    ce: ConstrainedExpression,
    samples: int = 100,
    seed: int = 0,
) -> list[ConstraintResidual]:
    """Random points on each constraint's hyperplane."""
    constraints = ce.constraints
    domain = constraints.domain
    rng = np.random.default_rng(seed)
    results = []
    for c in constraints.all():
        at = {}
        for axis, name in enumerate(domain.names, start=1):
            if axis == c.axis:
                at[name] = np.full(samples, c.point)
            else:
                at[name] = rng.uniform(*domain.interval(axis), samples)
        delta = [0] * domain.dimension
        delta[c.axis - 1] = c.order
        got = ce.evaluate(at, delta)
        want = self.exprs.evaluate(self.model.slice_of(constraints, c), at)
        results.append(ConstraintResidual(
            constraint=c.describe(),
            axis=c.axis,
            point=c.point,
            order=c.order,
            max_residual=float(np.max(np.abs(got - want))),
            samples=samples,
        ))
    return results
