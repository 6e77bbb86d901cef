"""Field expressions over chart coordinates ``x1..x4``.

Grammar (whitespace-insensitive)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' exponent)?
    exponent:= ['+' | '-'] INT | '(' ['+' | '-'] INT ')'
    atom    := NUMBER | 'x1' .. 'x4' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := sin | cos | exp | log | sqrt

Trees are immutable.  :func:`eval_jet2` evaluates value, gradient and
Hessian exactly via :class:`~curvlab.jets.Jet2`; :func:`eval_value` is a
plain numpy evaluator used by finite-difference checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, ExpressionSyntaxError, FieldDomainError, UnknownIdentifierError
from .jets import Jet2

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
COORDINATES = ("x1", "x2", "x3", "x4")


@dataclass(frozen=True)
class Node:
    column: int = field(default=0, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Coord(Node):
    index: int  # 0-based


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


FieldExpr = Node


# -- tokenizer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(src: str):
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            text = m.group()
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rfind("\n") + 1
        else:
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, src):
        self.tokens = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ExpressionSyntaxError):
        tok = tok or self.tok
        return cls(msg, tok.line, tok.column)

    def expect(self, text):
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok.text in ("+", "-"):
            t = self.advance()
            node = BinOp(t.text, node, self.term(), column=t.column)
        return node

    def term(self):
        node = self.unary()
        while self.tok.text in ("*", "/"):
            t = self.advance()
            node = BinOp(t.text, node, self.unary(), column=t.column)
        return node

    def unary(self):
        if self.tok.text == "-":
            t = self.advance()
            return Neg(self.unary(), column=t.column)
        if self.tok.text == "+":
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.text == "^":
            t = self.advance()
            return Pow(base, self.exponent(), column=t.column)
        return base

    def exponent(self):
        paren = self.tok.text == "("
        if paren:
            self.advance()
        sign = 1
        if self.tok.text in ("+", "-"):
            sign = -1 if self.advance().text == "-" else 1
        t = self.tok
        if t.kind != "number" or not t.text.isdigit():
            raise self.error("exponent must be an integer literal")
        self.advance()
        if paren:
            self.expect(")")
        return sign * int(t.text)

    def atom(self):
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Const(float(t.text), column=t.column)
        if t.kind == "ident":
            self.advance()
            if t.text in COORDINATES:
                return Coord(COORDINATES.index(t.text), column=t.column)
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                if self.tok.text == ",":
                    raise self.error(f"{t.text}() takes exactly one argument", cls=ArityError)
                self.expect(")")
                return Call(t.text, arg, column=t.column)
            raise self.error(f"unknown identifier {t.text!r}", t, cls=UnknownIdentifierError)
        if t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = t.text or "end of input"
        raise self.error(f"unexpected {found!r}")


def parse_field(src: str) -> FieldExpr:
    """Parse ``src`` into an immutable expression tree."""
    return _Parser(src).parse()


# -- printing --------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node: FieldExpr) -> str:
    """Render ``node`` so that ``parse_field(to_source(n)) == n``."""
    return _show(node, 0)


def _show(node, prec):
    if isinstance(node, Const):
        if not np.isfinite(node.value):
            raise ValueError("non-finite constant has no source form")
        s = repr(float(node.value))
        return f"({s})" if node.value < 0 else s
    if isinstance(node, Coord):
        return COORDINATES[node.index]
    if isinstance(node, Neg):
        s = "-" + _show(node.arg, 3)
        return f"({s})" if prec > 1 else s
    if isinstance(node, BinOp):
        p = _PREC[node.op]
        s = f"{_show(node.left, p)} {node.op} {_show(node.right, p + 1)}"
        return f"({s})" if p < prec else s
    if isinstance(node, Pow):
        e = str(node.exponent) if node.exponent >= 0 else f"({node.exponent})"
        s = f"{_show(node.base, 4)}^{e}"
        return f"({s})" if prec >= 4 else s
    if isinstance(node, Call):
        return f"{node.func}({_show(node.arg, 0)})"
    raise TypeError(f"not an expression node: {node!r}")


def depth(node: FieldExpr) -> int:
    if isinstance(node, (Const, Coord)):
        return 1
    if isinstance(node, BinOp):
        return 1 + max(depth(node.left), depth(node.right))
    if isinstance(node, Pow):
        return 1 + depth(node.base)
    return 1 + depth(node.arg)


# -- evaluation ----------------------------------------------------------------

def eval_jet2(node: FieldExpr, points) -> Jet2:
    """Value, gradient and Hessian of ``node`` at ``points`` (shape ``(4,)`` or ``S + (4,)``)."""
    points = np.asarray(points, dtype=float)
    if points.shape[-1:] != (4,):
        raise ValueError("chart points must have trailing dimension 4")
    return _jet(node, points)


def _jet(node, pts):
    if isinstance(node, Const):
        return Jet2.constant(node.value, pts.shape[:-1])
    if isinstance(node, Coord):
        return Jet2.coordinate(node.index, pts)
    try:
        if isinstance(node, Neg):
            return -_jet(node.arg, pts)
        if isinstance(node, BinOp):
            a, b = _jet(node.left, pts), _jet(node.right, pts)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        if isinstance(node, Pow):
            return _jet(node.base, pts) ** node.exponent
        if isinstance(node, Call):
            return getattr(_jet(node.arg, pts), node.func)()
    except FieldDomainError as exc:
        if exc.location is None:
            where = f"column {node.column}: {to_source(node)}"
            raise FieldDomainError(f"{exc} at {where}", location=where) from None
        raise
    raise TypeError(f"not an expression node: {node!r}")


def eval_value(node: FieldExpr, points):
    """Plain numpy evaluation of ``node`` (no derivatives, no domain guards)."""
    pts = np.asarray(points, dtype=float)
    if isinstance(node, Const):
        return np.full(pts.shape[:-1], node.value)
    if isinstance(node, Coord):
        return pts[..., node.index]
    if isinstance(node, Neg):
        return -eval_value(node.arg, pts)
    if isinstance(node, BinOp):
        a, b = eval_value(node.left, pts), eval_value(node.right, pts)
        return {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[node.op](a, b)
    if isinstance(node, Pow):
        return eval_value(node.base, pts) ** float(node.exponent)
    if isinstance(node, Call):
        return getattr(np, node.func)(eval_value(node.arg, pts))
    raise TypeError(f"not an expression node: {node!r}")


def is_constant(node: FieldExpr) -> bool:
    if isinstance(node, Const):
        return True
    if isinstance(node, Coord):
        return False
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    if isinstance(node, Pow):
        return is_constant(node.base)
    return is_constant(node.arg)
