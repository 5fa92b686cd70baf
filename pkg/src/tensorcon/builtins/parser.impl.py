"""tensorcon.builtins.parser -- Recursive-descent parser for expression text."""

from __future__ import annotations

import math
import re
from typing import Sequence

import tensorcon
from tensorcon.errors import ExprSyntaxError, UnknownIdentifierError
from tensorcon.expr import (
    UNARY_FUNCTIONS,
    Const,
    Expr,
    Var,
    add,
    apply,
    div,
    mod,
    mul,
    neg,
    power,
    sub,
)
from tensorcon.expr_engine import ExprEngine

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)
_CONSTANTS = {"pi": math.pi, "e": math.e}
_FUNCTIONS = frozenset(UNARY_FUNCTIONS) | {"mod"}
_POSITIONAL = re.compile(r"x(\d+)$")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _resolver(variables: Sequence[str] | None):
    """Map an identifier to a canonical variable name, or None when unknown."""
    if variables is None:
        def resolve(name: str) -> str | None:
            if name in ("x", "y", "z") or _POSITIONAL.match(name):
                return name
            return None
        return resolve

    names = list(variables)
    aliases = {name: name for name in names}
    for k, name in enumerate(names, start=1):
        aliases.setdefault(f"x{k}", name)
    if len(names) <= 3:
        for letter, name in zip(("x", "y", "z"), names):
            aliases.setdefault(letter, name)
    return aliases.get


class _Parser:
    """Precedence climbing over a token list.

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?
    atom   := number | const | var | func '(' expr (',' expr)? ')' | '(' expr ')'
    """

    def __init__(self, text: str, variables: Sequence[str] | None) -> None:
        self.tokens = _tokenize(text)
        self.index = 0
        self.resolve = _resolver(variables)

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.index]

    def advance(self) -> tuple[str, str, int]:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, value: str) -> None:
        kind, text, pos = self.advance()
        if text != value or kind != "op":
            found = text or "end of input"
            raise ExprSyntaxError(f"expected '{value}' but found '{found}'", pos)

    def parse(self) -> Expr:
        result = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected '{text}'", pos)
        return result

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            right = self.term()
            left = add(left, right) if op == "+" else sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            right = self.unary()
            left = mul(left, right) if op == "*" else div(left, right)
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return neg(self.unary())
        if kind == "op" and text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return power(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "number":
            return Const(float(text))
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "name":
            return self.identifier(text, pos)
        raise ExprSyntaxError(f"unexpected '{text or 'end of input'}'", pos)

    def identifier(self, name: str, pos: int) -> Expr:
        follows_paren = self.peek()[0] == "op" and self.peek()[1] == "("
        if name in _FUNCTIONS:
            if not follows_paren:
                raise ExprSyntaxError(f"function '{name}' requires arguments", pos)
            return self.call(name, pos)
        if follows_paren:
            raise UnknownIdentifierError(f"unknown function '{name}'", pos)
        if name in _CONSTANTS:
            return Const(_CONSTANTS[name])
        resolved = self.resolve(name)
        if resolved is None:
            raise UnknownIdentifierError(f"unknown identifier '{name}'", pos)
        return Var(resolved)

    def call(self, name: str, pos: int) -> Expr:
        self.expect("(")
        args = [self.expr()]
        while self.peek()[0] == "op" and self.peek()[1] == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        arity = 2 if name == "mod" else 1
        if len(args) != arity:
            raise ExprSyntaxError(f"'{name}' takes {arity} argument(s), got {len(args)}", pos)
        if name == "mod":
            modulus = args[1]
            if not isinstance(modulus, Const):
                raise ExprSyntaxError("mod requires a constant modulus", pos)
            if modulus.value == 0.0:
                raise ExprSyntaxError("mod by zero", pos)
            return mod(args[0], modulus.value)
        return apply(name, args[0])


@tensorcon.impl(ExprEngine.parse)
def parse(self: ExprEngine, text: str, variables: Sequence[str] | None = None) -> Expr:
    """Parse with standard precedence: ``-x^2`` is ``-(x^2)``."""
    return _Parser(text, variables).parse()
