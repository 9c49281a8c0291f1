"""A deliberately tiny arithmetic expression grammar for scenario files.

Grammar (whitespace insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?          # right-associative
    atom   := NUMBER | VARIABLE | FUNC "(" expr ")" | "(" expr ")"
    FUNC   := "sin" | "cos" | "log" | "exp"

``NUMBER`` is a decimal literal with optional fraction and exponent.  The
variable set is supplied by the caller (``u1``/``u2`` for field expressions,
empty for constants), keeping scenario files declarative without embedding a
scripting layer.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Sequence

_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "log": math.log,
    "exp": math.exp,
}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


class ExpressionError(ValueError):
    """Malformed expression text."""


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ExpressionError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.group("number") is not None:
            tokens.append(("number", float(m.group("number"))))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
        pos = m.end()
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, variables: Sequence[str]):
        self.tokens = tokens
        self.pos = 0
        self.variables = {name: index for index, name in enumerate(variables)}

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, value = self.next()
        if kind != "op" or value != op:
            raise ExpressionError(f"expected {op!r}, found {value!r}")

    def parse(self) -> Callable:
        node = self.expr()
        kind, value = self.peek()
        if kind != "end":
            raise ExpressionError(f"trailing input starting at {value!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.next()[1]
            rhs = self.term()
            lhs = node
            if op == "+":
                node = lambda *a, lhs=lhs, rhs=rhs: lhs(*a) + rhs(*a)
            else:
                node = lambda *a, lhs=lhs, rhs=rhs: lhs(*a) - rhs(*a)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.next()[1]
            rhs = self.unary()
            lhs = node
            if op == "*":
                node = lambda *a, lhs=lhs, rhs=rhs: lhs(*a) * rhs(*a)
            else:
                node = lambda *a, lhs=lhs, rhs=rhs: lhs(*a) / rhs(*a)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            inner = self.unary()
            return lambda *a, inner=inner: -inner(*a)
        if self.peek() == ("op", "+"):
            self.next()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.next()
            exponent = self.unary()
            return lambda *a, base=base, exponent=exponent: base(*a) ** exponent(*a)
        return base

    def atom(self):
        kind, value = self.next()
        if kind == "number":
            return lambda *a, value=value: value
        if kind == "name":
            if value in _FUNCTIONS:
                fn = _FUNCTIONS[value]
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return lambda *a, fn=fn, inner=inner: fn(inner(*a))
            if value in self.variables:
                index = self.variables[value]
                return lambda *a, index=index: a[index]
            raise ExpressionError(f"unknown name {value!r}")
        if (kind, value) == ("op", "("):
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ExpressionError(f"unexpected token {value!r}")


def compile_expression(text: str, variables: Sequence[str] = ("u1", "u2")) -> Callable:
    """Compile expression text to a callable of the listed variables."""
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    return _Parser(_tokenize(text), variables).parse()


def evaluate_constant(text: str) -> float:
    """Evaluate an expression with no free variables."""
    return float(compile_expression(text, variables=())())
