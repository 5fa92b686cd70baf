"""tensorcon.builtins.expr_engine -- Evaluation, differentiation, substitution and printing."""

from __future__ import annotations

from functools import singledispatch

import numpy as np

import tensorcon
from tensorcon.errors import EvaluationDomainError, UnboundVariableError
from tensorcon.expr import (
    ONE,
    ZERO,
    Binary,
    Const,
    Expr,
    Mod,
    ModSlope,
    Unary,
    Var,
    add,
    apply,
    binary,
    const,
    div,
    mod,
    mod_slope,
    mul,
    neg,
    power,
    sub,
)
from tensorcon.expr_engine import ExprEngine, Point

_NUMPY_UNARY = {
    "neg": np.negative,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2, "div": 2, "pow": 4}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _fail(reason: str, node: Expr) -> EvaluationDomainError:
    text = _text(node)
    if len(text) > 80:
        text = text[:77] + "..."
    return EvaluationDomainError(reason, text)


@singledispatch
def _eval(node: Expr, env: Point):
    raise TypeError(f"cannot evaluate {type(node).__name__}")


@_eval.register(Const)
def _eval_const(node: Const, env: Point):
    return node.value


@_eval.register(Var)
def _eval_var(node: Var, env: Point):
    try:
        return env[node.name]
    except KeyError:
        raise UnboundVariableError(node.name) from None


@_eval.register(Unary)
def _eval_unary(node: Unary, env: Point):
    a = _eval(node.arg, env)
    if node.op == "ln" and np.any(np.asarray(a) <= 0.0):
        raise _fail("ln of a non-positive value", node)
    if node.op == "sqrt" and np.any(np.asarray(a) < 0.0):
        raise _fail("sqrt of a negative value", node)
    with np.errstate(all="ignore"):
        result = _NUMPY_UNARY[node.op](a)
    if not np.all(np.isfinite(result)):
        raise _fail("non-finite result", node)
    return result


@_eval.register(Binary)
def _eval_binary(node: Binary, env: Point):
    left = _eval(node.left, env)
    right = _eval(node.right, env)
    if node.op == "div" and np.any(np.asarray(right) == 0.0):
        raise _fail("division by zero", node)
    with np.errstate(all="ignore"):
        if node.op == "add":
            result = np.add(left, right)
        elif node.op == "sub":
            result = np.subtract(left, right)
        elif node.op == "mul":
            result = np.multiply(left, right)
        elif node.op == "div":
            result = np.divide(left, right)
        else:
            result = np.power(np.asarray(left, dtype=float), right)
    if not np.all(np.isfinite(result)):
        raise _fail("non-finite result", node)
    return result


@_eval.register(Mod)
def _eval_mod(node: Mod, env: Point):
    if node.modulus == 0.0:
        raise _fail("mod by zero", node)
    return np.mod(_eval(node.arg, env), node.modulus)


@_eval.register(ModSlope)
def _eval_mod_slope(node: ModSlope, env: Point):
    a = _eval(node.arg, env)
    if node.modulus == 0.0 or np.any(np.mod(a, node.modulus) == 0.0):
        raise _fail("derivative of mod at a discontinuity", node)
    return np.ones_like(np.asarray(a, dtype=float))


@tensorcon.impl(ExprEngine.evaluate)
def evaluate(self: ExprEngine, e: Expr, at: Point) -> float | np.ndarray:
    """Vectorized evaluation; scalar bindings give a float."""
    shape = np.broadcast_shapes(*(np.shape(v) for v in at.values())) if at else ()
    result = _eval(e, at)
    if shape == ():
        return float(result)
    return np.array(np.broadcast_to(result, shape), dtype=float)


# ---------------------------------------------------------------------------
# Differentiation
# ---------------------------------------------------------------------------

@singledispatch
def _d(node: Expr, name: str) -> Expr:
    raise TypeError(f"cannot differentiate {type(node).__name__}")


@_d.register(Const)
def _d_const(node: Const, name: str) -> Expr:
    return ZERO


@_d.register(Var)
def _d_var(node: Var, name: str) -> Expr:
    return ONE if node.name == name else ZERO


@_d.register(Unary)
def _d_unary(node: Unary, name: str) -> Expr:
    a = node.arg
    da = _derive(a, name)
    op = node.op
    if op == "neg":
        return neg(da)
    if op == "sin":
        return mul(apply("cos", a), da)
    if op == "cos":
        return neg(mul(apply("sin", a), da))
    if op == "tan":
        return mul(add(ONE, power(node, const(2.0))), da)
    if op == "exp":
        return mul(node, da)
    if op == "ln":
        return div(da, a)
    if op == "sqrt":
        return div(da, mul(const(2.0), node))
    # abs: sign(a) written as abs(a)/a, undefined at the kink
    return mul(div(node, a), da)


@_d.register(Binary)
def _d_binary(node: Binary, name: str) -> Expr:
    a, b = node.left, node.right
    op = node.op
    if op in ("add", "sub"):
        return binary(op, _derive(a, name), _derive(b, name))
    if op == "mul":
        return add(mul(_derive(a, name), b), mul(a, _derive(b, name)))
    if op == "div":
        if not b.depends_on(name):
            return div(_derive(a, name), b)
        return sub(
            div(_derive(a, name), b),
            div(mul(a, _derive(b, name)), power(b, const(2.0))),
        )
    # pow
    if not b.depends_on(name):
        return mul(mul(b, power(a, sub(b, ONE))), _derive(a, name))
    if not a.depends_on(name):
        return mul(mul(node, apply("ln", a)), _derive(b, name))
    return mul(node, add(
        mul(_derive(b, name), apply("ln", a)),
        div(mul(b, _derive(a, name)), a),
    ))


@_d.register(Mod)
def _d_mod(node: Mod, name: str) -> Expr:
    return mul(mod_slope(node.arg, node.modulus), _derive(node.arg, name))


@_d.register(ModSlope)
def _d_mod_slope(node: ModSlope, name: str) -> Expr:
    return ZERO


def _derive(node: Expr, name: str) -> Expr:
    if name not in node.variables:
        return ZERO
    return _d(node, name)


@tensorcon.impl(ExprEngine.diff)
def diff(self: ExprEngine, e: Expr, var: str, order: int = 1) -> Expr:
    """Repeated symbolic differentiation."""
    if order < 0:
        raise ValueError(f"derivative order must be non-negative, got {order}")
    for _ in range(order):
        e = _derive(e, var)
    return e


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def _subst(node: Expr, name: str, value: Const) -> Expr:
    if name not in node.variables:
        return node
    if isinstance(node, Var):
        return value
    if isinstance(node, Unary):
        return apply(node.op, _subst(node.arg, name, value))
    if isinstance(node, Binary):
        return binary(node.op, _subst(node.left, name, value), _subst(node.right, name, value))
    if isinstance(node, Mod):
        return mod(_subst(node.arg, name, value), node.modulus)
    if isinstance(node, ModSlope):
        return mod_slope(_subst(node.arg, name, value), node.modulus)
    raise TypeError(f"cannot substitute into {type(node).__name__}")


@tensorcon.impl(ExprEngine.substitute)
def substitute(self: ExprEngine, e: Expr, var: str, value: float) -> Expr:
    """Rebuild the tree with ``var`` replaced, folding constants on the way up."""
    return _subst(e, var, Const(float(value)))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _prec(node: Expr) -> int:
    if isinstance(node, Const):
        return 3 if node.value < 0.0 else 5
    if isinstance(node, Unary) and node.op == "neg":
        return 3
    if isinstance(node, Binary):
        return _PRECEDENCE[node.op]
    if isinstance(node, ModSlope):
        return 2
    return 5


def _wrap(node: Expr, minimum: int) -> str:
    text = _text(node)
    return text if _prec(node) >= minimum else f"({text})"


def _text(node: Expr) -> str:
    if isinstance(node, Const):
        return _number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.arg, 3)
        return f"{node.op}({_text(node.arg)})"
    if isinstance(node, Binary):
        p = _PRECEDENCE[node.op]
        if node.op == "pow":
            return f"{_wrap(node.left, 5)}^{_wrap(node.right, 3)}"
        return f"{_wrap(node.left, p)} {_SYMBOL[node.op]} {_wrap(node.right, p + 1)}"
    if isinstance(node, Mod):
        return f"mod({_text(node.arg)}, {_number(node.modulus)})"
    if isinstance(node, ModSlope):
        inner = f"mod({_text(node.arg)}, {_number(node.modulus)})"
        return f"{inner}/{inner}"
    raise TypeError(f"cannot print {type(node).__name__}")


@tensorcon.impl(ExprEngine.to_text)
def to_text(self: ExprEngine, e: Expr) -> str:
    """Minimal-parenthesis printer; the parser reads the result back to the same tree shape."""
    return _text(e)
