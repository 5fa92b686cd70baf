"""tensorcon.expr -- Immutable expression trees over named variables.

Nodes are frozen dataclasses compared by identity. The module-level
constructors (``add``, ``mul``, ``power``, ...) fold constants and drop
neutral elements so that repeated differentiation and substitution keep
trees small; the arithmetic operators on ``Expr`` route through them.
Evaluation, differentiation and printing live in the expression engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

UNARY_FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs")
BINARY_OPS = ("add", "sub", "mul", "div", "pow")

_FOLD = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
    "abs": abs,
}


class Expr:
    """Base class of expression nodes.

    Attributes:
        variables: Names of the variables occurring in the tree.
    """

    variables: frozenset[str]

    def __add__(self, other: Operand) -> Expr:
        return add(self, as_expr(other))

    def __radd__(self, other: Operand) -> Expr:
        return add(as_expr(other), self)

    def __sub__(self, other: Operand) -> Expr:
        return sub(self, as_expr(other))

    def __rsub__(self, other: Operand) -> Expr:
        return sub(as_expr(other), self)

    def __mul__(self, other: Operand) -> Expr:
        return mul(self, as_expr(other))

    def __rmul__(self, other: Operand) -> Expr:
        return mul(as_expr(other), self)

    def __truediv__(self, other: Operand) -> Expr:
        return div(self, as_expr(other))

    def __rtruediv__(self, other: Operand) -> Expr:
        return div(as_expr(other), self)

    def __pow__(self, other: Operand) -> Expr:
        return power(self, as_expr(other))

    def __rpow__(self, other: Operand) -> Expr:
        return power(as_expr(other), self)

    def __neg__(self) -> Expr:
        return neg(self)

    def depends_on(self, name: str) -> bool:
        return name in self.variables


Operand = Union[Expr, int, float]


@dataclass(frozen=True, eq=False)
class Const(Expr):
    """A real constant."""

    value: float
    variables: frozenset[str] = field(default=frozenset(), init=False, repr=False)


@dataclass(frozen=True, eq=False)
class Var(Expr):
    """A named variable."""

    name: str
    variables: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", frozenset((self.name,)))


@dataclass(frozen=True, eq=False)
class Unary(Expr):
    """Negation or one of ``UNARY_FUNCTIONS`` applied to ``arg``."""

    op: str
    arg: Expr
    variables: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", self.arg.variables)


@dataclass(frozen=True, eq=False)
class Binary(Expr):
    """One of ``BINARY_OPS`` applied to ``left`` and ``right``."""

    op: str
    left: Expr
    right: Expr
    variables: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", self.left.variables | self.right.variables)


@dataclass(frozen=True, eq=False)
class Mod(Expr):
    """``arg`` modulo a constant, with the sign of the modulus."""

    arg: Expr
    modulus: float
    variables: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", self.arg.variables)


@dataclass(frozen=True, eq=False)
class ModSlope(Expr):
    """Derivative factor of ``Mod``: 1 between jumps, undefined on them."""

    arg: Expr
    modulus: float
    variables: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", self.arg.variables)


ZERO = Const(0.0)
ONE = Const(1.0)


def const(value: float) -> Const:
    if value == 0.0:
        return ZERO
    if value == 1.0:
        return ONE
    return Const(float(value))


def as_expr(value: Operand) -> Expr:
    if isinstance(value, Expr):
        return value
    return const(float(value))


def is_const(e: Expr, value: float | None = None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def _finite(value: float) -> bool:
    return math.isfinite(value)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return const(-a.value)
    if isinstance(a, Unary) and a.op == "neg":
        return a.arg
    return Unary("neg", a)


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value + b.value)
    if is_const(a, 0.0):
        return b
    if is_const(b, 0.0):
        return a
    return Binary("add", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value - b.value)
    if is_const(b, 0.0):
        return a
    if is_const(a, 0.0):
        return neg(b)
    if a is b:
        return ZERO
    return Binary("sub", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.value * b.value)
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const):
        if a.value == 0.0:
            return ZERO
        if a.value == 1.0:
            return b
        if a.value == -1.0:
            return neg(b)
        if isinstance(b, Binary) and b.op == "mul" and isinstance(b.left, Const):
            return mul(const(a.value * b.left.value), b.right)
    return Binary("mul", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return const(a.value / b.value)
    if is_const(b, 1.0):
        return a
    if is_const(a, 0.0) and not is_const(b, 0.0):
        return ZERO
    return Binary("div", a, b)


def power(a: Expr, b: Expr) -> Expr:
    if is_const(b, 0.0):
        return ONE
    if is_const(b, 1.0):
        return a
    if is_const(a, 1.0):
        return ONE
    if isinstance(a, Const) and isinstance(b, Const):
        try:
            value = math.pow(a.value, b.value)
        except (ValueError, OverflowError, ZeroDivisionError):
            value = math.nan
        if _finite(value):
            return const(value)
    return Binary("pow", a, b)


def apply(op: str, a: Expr) -> Expr:
    """Apply a named unary function, folding constant arguments when defined."""
    if op == "neg":
        return neg(a)
    if op not in _FOLD:
        raise ValueError(f"unknown function '{op}'")
    if isinstance(a, Const):
        try:
            value = float(_FOLD[op](a.value))
        except (ValueError, OverflowError):
            value = math.nan
        if _finite(value):
            return const(value)
    return Unary(op, a)


def binary(op: str, a: Expr, b: Expr) -> Expr:
    if op == "add":
        return add(a, b)
    if op == "sub":
        return sub(a, b)
    if op == "mul":
        return mul(a, b)
    if op == "div":
        return div(a, b)
    if op == "pow":
        return power(a, b)
    raise ValueError(f"unknown operator '{op}'")


def mod(a: Expr, modulus: float) -> Expr:
    if isinstance(a, Const) and modulus != 0.0:
        return const(a.value % modulus)
    return Mod(a, float(modulus))


def mod_slope(a: Expr, modulus: float) -> Expr:
    if isinstance(a, Const) and modulus != 0.0 and a.value % modulus != 0.0:
        return ONE
    return ModSlope(a, float(modulus))


def sin(a: Operand) -> Expr:
    return apply("sin", as_expr(a))


def cos(a: Operand) -> Expr:
    return apply("cos", as_expr(a))


def total(terms: list[Expr]) -> Expr:
    """Sum a list of expressions left to right."""
    result: Expr = ZERO
    for term in terms:
        result = add(result, term)
    return result


def polynomial(coefficients: list[float], x: Expr) -> Expr:
    """Build ``sum(c_k * x**k)`` skipping zero coefficients."""
    return total([
        mul(const(c), power(x, const(k)))
        for k, c in enumerate(coefficients)
        if c != 0.0
    ])
