"""Arithmetic expression language for kernel formulas in run files.

Grammar: + - * / with the usual precedence, ** (or ^) for powers binding
right, unary minus, parentheses, float literals, the constants pi and e,
one-argument functions exp, log, sqrt, abs, sin, cos, tan and two-argument
min and max.  Variable names are declared by the caller; anything else is
rejected at compile time.  Compiled expressions evaluate through numpy, so
they broadcast over scalar and array inputs alike.
"""

from __future__ import annotations

import re
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = ["compile_expression"]

_UNARY = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
}
_BINARY = {"min": np.minimum, "max": np.maximum}
_CONSTANTS = {"pi": np.pi, "e": np.e}

_TOKEN = re.compile(
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),])"
)


class _Token(NamedTuple):
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"bad character {text[pos]!r} at position {pos} in {text!r}")
        tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive descent over the token list; nodes are closures mapping an
    argument tuple to a value."""

    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.slots = {name: i for i, name in enumerate(variables)}

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"unexpected end of expression: {self.text!r}")
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.take()
        if tok.text != text:
            raise ValueError(
                f"expected {text!r} at position {tok.pos} in {self.text!r}, got {tok.text!r}")

    def parse(self) -> Callable:
        node = self.sum()
        tok = self.peek()
        if tok is not None:
            raise ValueError(f"trailing {tok.text!r} at position {tok.pos} in {self.text!r}")
        return node

    def sum(self) -> Callable:
        node = self.product()
        while (tok := self.peek()) is not None and tok.text in "+-":
            self.take()
            rhs = self.product()
            lhs = node
            if tok.text == "+":
                node = lambda args, a=lhs, b=rhs: a(args) + b(args)
            else:
                node = lambda args, a=lhs, b=rhs: a(args) - b(args)
        return node

    def product(self) -> Callable:
        node = self.unary()
        while (tok := self.peek()) is not None and tok.text in ("*", "/"):
            self.take()
            rhs = self.unary()
            lhs = node
            if tok.text == "*":
                node = lambda args, a=lhs, b=rhs: a(args) * b(args)
            else:
                node = lambda args, a=lhs, b=rhs: a(args) / b(args)
        return node

    def unary(self) -> Callable:
        tok = self.peek()
        if tok is not None and tok.text == "-":
            self.take()
            inner = self.unary()
            return lambda args, a=inner: -a(args)
        return self.power()

    def power(self) -> Callable:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.text in ("**", "^"):
            self.take()
            exponent = self.unary()
            return lambda args, a=base, b=exponent: a(args) ** b(args)
        return base

    def atom(self) -> Callable:
        tok = self.take()
        if tok.kind == "number":
            value = float(tok.text)
            return lambda args, v=value: v
        if tok.kind == "name":
            return self.name(tok)
        if tok.text == "(":
            node = self.sum()
            self.expect(")")
            return node
        raise ValueError(
            f"unexpected {tok.text!r} at position {tok.pos} in {self.text!r}")

    def name(self, tok: _Token) -> Callable:
        nxt = self.peek()
        if nxt is not None and nxt.text == "(":
            self.take()
            args = [self.sum()]
            while (sep := self.peek()) is not None and sep.text == ",":
                self.take()
                args.append(self.sum())
            self.expect(")")
            if tok.text in _UNARY:
                if len(args) != 1:
                    raise ValueError(f"{tok.text} takes 1 argument, got {len(args)}")
                fn, (inner,) = _UNARY[tok.text], args
                return lambda a, f=fn, x=inner: f(x(a))
            if tok.text in _BINARY:
                if len(args) != 2:
                    raise ValueError(f"{tok.text} takes 2 arguments, got {len(args)}")
                fn, (left, right) = _BINARY[tok.text], args
                return lambda a, f=fn, x=left, y=right: f(x(a), y(a))
            raise ValueError(
                f"unknown function {tok.text!r}; choose from "
                f"{sorted(_UNARY) + sorted(_BINARY)}")
        if tok.text in self.slots:
            slot = self.slots[tok.text]
            return lambda args, i=slot: args[i]
        if tok.text in _CONSTANTS:
            value = _CONSTANTS[tok.text]
            return lambda args, v=value: v
        raise ValueError(
            f"unknown name {tok.text!r} at position {tok.pos}; variables here are "
            f"{sorted(self.slots)}")


def compile_expression(text: str, variables: Sequence[str]) -> Callable:
    """Compile a formula into a function of the declared variables.

    >>> k = compile_expression("0.34 * exp((x^2 + y^2) / 2)", ("x", "y"))
    >>> round(k(0.0, 1.0), 6)
    0.560565
    """
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise ValueError(f"duplicate variable names in {variables}")
    for name in variables:
        if name in _CONSTANTS or name in _UNARY or name in _BINARY:
            raise ValueError(f"variable name {name!r} collides with a builtin")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
            raise ValueError(f"invalid variable name {name!r}")
    if not text or not text.strip():
        raise ValueError("empty expression")
    node = _Parser(text, variables).parse()
    return lambda *args: node(args)
