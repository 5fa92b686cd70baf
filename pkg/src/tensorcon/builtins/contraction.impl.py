"""tensorcon.builtins.contraction -- ConstrainedExpression evaluation.

For an index tuple I, the blend of axis k is the constant 1 when i_k = 0
and the entry M_I no longer depends on x_k when i_k != 0. A partial
derivative along x_k therefore falls entirely on M_I in the first case and
entirely on the blend in the second, so each derivative contraction is one
einsum over differentiated entries and differentiated blends.
"""

from __future__ import annotations

import string
import threading
from typing import Sequence

import numpy as np

import tensorcon
from tensorcon.errors import TensorconError, UnboundVariableError
from tensorcon.expr import Expr, mul, sub, total
from tensorcon.tensor import MAX_PARTIAL_ORDER, ConstrainedExpression, MTensor


def _normalize(ce: ConstrainedExpression, delta: Sequence[int] | None) -> tuple[int, ...]:
    n = ce.constraints.domain.dimension
    if delta is None:
        return (0,) * n
    delta = tuple(int(d) for d in delta)
    if len(delta) != n:
        raise TensorconError(f"multi-index {delta} has {len(delta)} entries for {n} axes")
    if any(d < 0 for d in delta):
        raise TensorconError(f"negative order in multi-index {delta}")
    if sum(delta) > MAX_PARTIAL_ORDER:
        raise TensorconError(f"total derivative order {sum(delta)} exceeds {MAX_PARTIAL_ORDER}")
    return delta


def _shape(ce: ConstrainedExpression, at) -> tuple[int, ...]:
    names = ce.constraints.domain.names
    for name in names:
        if name not in at:
            raise UnboundVariableError(name)
    return np.broadcast_shapes(*(np.shape(at[name]) for name in names))


def _derived(ce: ConstrainedExpression, key: tuple, base: Expr, delta: tuple[int, ...]) -> Expr:
    """Derivative of ``base`` by ``delta``, memoized under ``key``."""
    if not any(delta):
        return base
    found = ce.cache.get(key)
    if found is not None:
        return found
    with ce.lock:
        found = ce.cache.get(key)
        if found is None:
            exprs = ce.engine.exprs
            found = base
            for name, order in zip(ce.constraints.domain.names, delta):
                if order:
                    found = exprs.diff(found, name, order)
            ce.cache[key] = found
    return found


def _values(ce: ConstrainedExpression, e: Expr, at, shape: tuple[int, ...]) -> np.ndarray:
    return np.broadcast_to(np.asarray(ce.engine.exprs.evaluate(e, at), dtype=float), shape)


def _weights(ce: ConstrainedExpression, at, delta: tuple[int, ...], shape: tuple[int, ...]) -> list[np.ndarray]:
    n = len(delta)
    weights = []
    for k, v in enumerate(ce.vectors):
        rows = [np.ones(shape)]
        order = tuple(delta[k] if j == k else 0 for j in range(n))
        for j, component in enumerate(v.components[1:], start=1):
            blend = _derived(ce, ("v", k, j, order), component, order)
            rows.append(_values(ce, blend, at, shape))
        weights.append(np.stack(rows))
    return weights


def _contract(
    ce: ConstrainedExpression,
    tag: str,
    tensor: MTensor,
    weights: list[np.ndarray],
    at,
    delta: tuple[int, ...],
    shape: tuple[int, ...],
) -> np.ndarray:
    values = np.empty(tensor.extents + shape)
    for index in np.ndindex(*tensor.extents):
        on_entry = tuple(d if i == 0 else 0 for d, i in zip(delta, index))
        entry = _derived(ce, (tag, index, on_entry), tensor[index], on_entry)
        values[index] = _values(ce, entry, at, shape)
    letters = string.ascii_lowercase[: len(delta)]
    subscripts = letters + "...," + ",".join(f"{c}..." for c in letters) + "->..."
    return np.einsum(subscripts, values, *weights)


def _parts(ce: ConstrainedExpression, at, delta):
    delta = _normalize(ce, delta)
    shape = _shape(ce, at)
    weights = _weights(ce, at, delta, shape)
    a = _contract(ce, "c", ce.m_c, weights, at, delta, shape)
    a_g = _contract(ce, "g", ce.m_g, weights, at, delta, shape)
    g = _values(ce, _derived(ce, ("free", delta), ce.g, delta), at, shape)
    return a, g - a_g, shape


def _out(value: np.ndarray, shape: tuple[int, ...]) -> float | np.ndarray:
    return float(value) if shape == () else np.array(value, dtype=float)


@tensorcon.impl(ConstrainedExpression.evaluate)
def evaluate(self: ConstrainedExpression, at, delta: Sequence[int] | None = None) -> float | np.ndarray:
    """f = A + B."""
    a, b, shape = _parts(self, at, delta)
    return _out(a + b, shape)


@tensorcon.impl(ConstrainedExpression.evaluate_parts)
def evaluate_parts(self: ConstrainedExpression, at, delta: Sequence[int] | None = None):
    """(A, B) with B = g - A(g)."""
    a, b, shape = _parts(self, at, delta)
    return _out(a, shape), _out(b, shape)


@tensorcon.impl(ConstrainedExpression.with_free_function)
def with_free_function(self: ConstrainedExpression, g: Expr) -> ConstrainedExpression:
    """Shares vectors and M(c); only M(g) is rebuilt."""
    with self.lock:
        cache = {key: value for key, value in self.cache.items() if key[0] in ("c", "v")}
    return ConstrainedExpression(
        engine=self.engine,
        constraints=self.constraints,
        vectors=self.vectors,
        m_c=self.m_c,
        g=g,
        m_g=self.engine.build_m(self.constraints, g),
        cache=cache,
        lock=threading.Lock(),
    )


@tensorcon.impl(ConstrainedExpression.as_expr)
def as_expr(self: ConstrainedExpression) -> Expr:
    """sum over I of (M(c)_I - M(g)_I) prod_k v_k[i_k], plus g."""
    terms = []
    for index in np.ndindex(*self.m_c.extents):
        term = sub(self.m_c[index], self.m_g[index])
        for v, i in zip(self.vectors, index):
            term = mul(term, v.components[i])
        terms.append(term)
    return total([*terms, self.g])
