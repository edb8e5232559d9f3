"""Drift expressions: a small recursive-descent parser and evaluator.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          right-associative
    primary := NUMBER | 'x' | FUNC '(' expr ')' | '(' expr ')'

``FUNC`` is one of sin, cos, exp, tanh, atan, abs.  ``-x^2`` is ``-(x^2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExpressionSyntaxError, UnknownIdentifier

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "tanh": np.tanh,
    "atan": np.arctan,
    "abs": np.abs,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


def _tokenize(src: str):
    # offsets are reported in bytes of the UTF-8 source
    def byte_offset(i):
        return len(src[:i].encode())

    pos = 0
    tokens = []
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", byte_offset(pos))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), byte_offset(m.start(kind))))
        pos = m.end()
    tokens.append(("end", "", byte_offset(len(src))))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text):
        kind, val, off = self.take()
        if val != text or kind != "op":
            raise ExpressionSyntaxError(f"expected {text!r}, found {val or 'end of input'!r}", off)

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if val == "x":
                return Var()
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            raise UnknownIdentifier(f"unknown identifier {val!r} at offset {off}")
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {val or 'end of input'!r}", off)


@dataclass(frozen=True)
class DriftExpression:
    source: str
    tree: Node

    def __call__(self, x):
        return evaluate(self.tree, x)


def parse_expression(src: str) -> DriftExpression:
    """Parse ``src`` into a :class:`DriftExpression`.

    Raises
    ------
    ExpressionSyntaxError
        With the byte offset of the offending token.
    UnknownIdentifier
    """
    p = _Parser(src)
    tree = p.expr()
    kind, val, off = p.peek()
    if kind != "end":
        raise ExpressionSyntaxError(f"unexpected {val!r}", off)
    return DriftExpression(src, tree)


def evaluate(node: Node, x):
    """Evaluate a tree at ``x`` (scalar or array)."""
    if isinstance(node, Num):
        return node.value + 0.0 * np.asarray(x, dtype=float) if np.ndim(x) else node.value
    if isinstance(node, Var):
        return np.asarray(x, dtype=float) if np.ndim(x) else float(x)
    if isinstance(node, Neg):
        return -evaluate(node.operand, x)
    if isinstance(node, Call):
        out = FUNCTIONS[node.func](evaluate(node.arg, x))
        return out if np.ndim(out) else float(out)
    a = evaluate(node.left, x)
    b = evaluate(node.right, x)
    with np.errstate(all="ignore"):
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return np.divide(a, b) if np.ndim(a) or np.ndim(b) else (a / b if b != 0 else float("nan"))
        return np.power(a, b) if np.ndim(a) or np.ndim(b) else _scalar_pow(a, b)


def _scalar_pow(a, b):
    try:
        out = a ** b
    except (OverflowError, ZeroDivisionError):
        return float("nan")
    return out if isinstance(out, float) else float("nan")


def pretty(node: Node) -> str:
    """Fully parenthesized source that parses back to the same tree."""
    if isinstance(node, Num):
        return repr(node.value) if node.value >= 0 else f"({repr(node.value)})"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{pretty(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({pretty(node.arg)})"
    return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
