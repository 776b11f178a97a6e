"""Parser and evaluator for the scenario expression mini-language.

Grammar (precedence high to low): ``^`` with integer exponents (right
associative), unary ``-``, ``*`` ``/``, ``+`` ``-``; parentheses;
functions exp, conj, re, im, sqrt; variables x, y, z (= x + iy) and
zbar; literals like ``1.5`` and ``2i``.  Errors carry line/column
positions.
"""

from __future__ import annotations

import re as _re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ExpressionError

VARIABLES = ("x", "y", "z", "zbar")
FUNCTIONS: dict[str, Callable] = {
    "exp": np.exp,
    "conj": np.conj,
    "re": lambda v: np.real(v) + 0j,
    "im": lambda v: np.imag(v) + 0j,
    "sqrt": np.sqrt,
}

_NUM_RE = _re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = _re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # number | imag | ident | op | end
    text: str
    line: int
    column: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(src)
    line = 1
    line_start = 0
    while pos < n:
        ch = src[pos]
        if ch == "\n":
            line += 1
            line_start = pos + 1
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            continue
        col = pos - line_start + 1
        m = _NUM_RE.match(src, pos)
        if m:
            text = m.group(0)
            pos = m.end()
            is_imag = (pos < n and src[pos] == "i"
                       and (pos + 1 >= n
                            or not (src[pos + 1].isalnum() or src[pos + 1] == "_")))
            if is_imag:
                pos += 1
                tokens.append(Token("imag", text, line, col))
            else:
                tokens.append(Token("number", text, line, col))
            continue
        m = _IDENT_RE.match(src, pos)
        if m:
            tokens.append(Token("ident", m.group(0), line, col))
            pos = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(Token("op", ch, line, col))
            pos += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("end", "", line, n - line_start + 1))
    return tokens


# AST nodes
@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ExpressionError(message, tok.line, tok.column)

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.error(f"unexpected {tok.text!r} after expression")
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        # integer literals only; towers associate to the right
        sign = 1
        while self.peek().kind == "op" and self.peek().text == "-":
            self.advance()
            sign = -sign
        tok = self.peek()
        if tok.kind != "number":
            self.error("exponent must be an integer literal")
        if "." in tok.text or "e" in tok.text or "E" in tok.text:
            self.error("exponent must be an integer literal")
        self.advance()
        value = sign * int(tok.text)
        if self.peek().kind == "op" and self.peek().text == "^":
            self.advance()
            value = value ** self.exponent()
        return value

    def atom(self):
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(complex(float(tok.text)))
        if tok.kind == "imag":
            self.advance()
            return Num(complex(0.0, float(tok.text)))
        if tok.kind == "ident":
            self.advance()
            if self.peek().kind == "op" and self.peek().text == "(":
                if tok.text not in FUNCTIONS:
                    self.error(f"unknown function {tok.text!r}", tok)
                self.advance()
                arg = self.expr()
                closing = self.peek()
                if closing.kind != "op" or closing.text != ")":
                    self.error("expected ')'")
                self.advance()
                return Call(tok.text, arg)
            if tok.text not in VARIABLES:
                self.error(f"unknown identifier {tok.text!r}", tok)
            return Var(tok.text)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            closing = self.peek()
            if closing.kind != "op" or closing.text != ")":
                self.error("expected ')'")
            self.advance()
            return node
        self.error("expected operand")


def parse_expression(src: str):
    """Parse a source string into an AST; positions feed error messages."""
    return _Parser(tokenize(src)).parse()


def evaluate(node, env: dict) -> np.ndarray | complex:
    """Evaluate an AST over an environment of numpy arrays or scalars.

    Division is guarded: off-domain blowups become inf/nan values for
    the caller's masking rather than exceptions.
    """
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise ExpressionError(f"variable {node.name!r} not available here")
        return env[node.name]
    if isinstance(node, Neg):
        return -evaluate(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.fn](evaluate(node.arg, env))
    if isinstance(node, Pow):
        base = evaluate(node.base, env)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(base, dtype=complex) ** node.exponent
    if isinstance(node, BinOp):
        left = evaluate(node.left, env)
        right = evaluate(node.right, env)
        with np.errstate(divide="ignore", invalid="ignore"):
            if node.op == "+":
                return left + right
            if node.op == "-":
                return left - right
            if node.op == "*":
                return left * right
            return np.asarray(left, dtype=complex) / right
    raise TypeError(f"not an AST node: {node!r}")


def grid_env(grid) -> dict:
    return {"x": grid.x.astype(complex), "y": grid.y.astype(complex),
            "z": grid.z, "zbar": np.conj(grid.z)}


def point_env(z: np.ndarray | complex) -> dict:
    z = np.asarray(z, dtype=complex)
    return {"x": z.real.astype(complex), "y": z.imag.astype(complex),
            "z": z, "zbar": np.conj(z)}


def evaluate_on_grid(src_or_ast, grid) -> np.ndarray:
    node = parse_expression(src_or_ast) if isinstance(src_or_ast, str) else src_or_ast
    vals = evaluate(node, grid_env(grid))
    return np.broadcast_to(np.asarray(vals, dtype=complex), grid.shape()).copy()


def as_function_of_z(src_or_ast) -> Callable[[np.ndarray], np.ndarray]:
    """Compile an expression into a callable of the complex coordinate."""
    node = parse_expression(src_or_ast) if isinstance(src_or_ast, str) else src_or_ast

    def fn(zv):
        out = evaluate(node, point_env(zv))
        return np.broadcast_to(np.asarray(out, dtype=complex),
                               np.asarray(zv).shape).copy()

    return fn


def constant_value(src: str) -> complex:
    """Evaluate an expression that must not reference grid variables."""
    node = parse_expression(src)
    value = evaluate(node, {})
    return complex(value)
