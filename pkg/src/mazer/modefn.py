"""Cavity mode profiles ``u(z)``: a small expression language with exact
first and second derivatives.

Grammar (whitespace insensitive)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          # right associative
    atom    := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Names are ``z``, ``L`` and ``pi``; functions are ``sin cos exp tanh sech
sqrt``. Every mode is truncated to the open cavity interval ``(0, L)`` and
is exactly zero elsewhere, including at ``z = 0`` and ``z = L``.
"""

from dataclasses import dataclass
import math
import re

import numpy as np

from . import jets
from .errors import ArityError, DomainError, ParseError, UnknownIdentifier

__all__ = [
    "Num", "Name", "Neg", "BinOp", "Call", "ModeExpr",
    "parse", "unparse", "eval012", "BUILTINS",
]

MAX_DEPTH = 200


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


FUNCTIONS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "exp": jets.exp,
    "tanh": jets.tanh,
    "sech": jets.sech,
    "sqrt": jets.sqrt,
}
NAMES = ("z", "L", "pi")

BUILTINS = {
    "mesa": "1",
    "sine": "sin(pi*z/L)",
    "sine2": "sin(pi*z/L)^2",
    "gauss": "exp(-(z-L/2)^2*16/L^2)",
    "sech2": "sech((z-L/2)*8/L)^2",
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _byte_offset(text, index):
    return len(text[:index].encode("utf-8", errors="surrogatepass"))


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.depth = 0

    def error(self, cls, message, pos=None):
        if pos is None:
            pos = self.tokens[self.i][2]
        return cls(message, _byte_offset(self.text, pos))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.peek()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise self.error(ParseError, f"expected {value!r}, found {found}")
        return self.advance()

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error(ParseError, "expression nested too deeply")

    def parse(self):
        node = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise self.error(ParseError, f"unexpected {text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        self.enter()
        try:
            if self.peek()[:2] == ("op", "-"):
                self.advance()
                return Neg(self.unary())
            return self.power()
        finally:
            self.depth -= 1

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            value = float(text)
            if not math.isfinite(value):
                raise self.error(ParseError, f"number {text!r} is out of range", pos)
            return Num(value)
        if kind == "name":
            self.advance()
            if self.peek()[:2] == ("op", "("):
                return self.call(text, pos)
            if text not in NAMES:
                if text in FUNCTIONS:
                    raise self.error(ArityError, f"function {text!r} used without arguments", pos)
                raise self.error(UnknownIdentifier, f"unknown identifier {text!r}", pos)
            return Name(text)
        if (kind, text) == ("op", "("):
            self.advance()
            self.enter()
            node = self.expr()
            self.depth -= 1
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise self.error(ParseError, f"expected an operand, found {found}")

    def call(self, func, pos):
        if func not in FUNCTIONS:
            raise self.error(UnknownIdentifier, f"unknown function {func!r}", pos)
        self.expect("(")
        self.enter()
        args = [self.expr()]
        while self.peek()[:2] == ("op", ","):
            self.advance()
            args.append(self.expr())
        self.depth -= 1
        self.expect(")")
        if len(args) != 1:
            raise self.error(ArityError, f"{func} takes 1 argument, got {len(args)}", pos)
        return Call(func, tuple(args))


def unparse(node):
    """Fully parenthesised source text; ``parse(unparse(a)).ast == a``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.id
    if isinstance(node, Neg):
        return f"(-{unparse(node.operand)})"
    if isinstance(node, BinOp):
        return f"({unparse(node.left)} {node.op} {unparse(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(unparse(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def _depends_on_z(node):
    if isinstance(node, Name):
        return node.id == "z"
    if isinstance(node, Num):
        return False
    if isinstance(node, Neg):
        return _depends_on_z(node.operand)
    if isinstance(node, BinOp):
        return _depends_on_z(node.left) or _depends_on_z(node.right)
    return any(_depends_on_z(a) for a in node.args)


def _const(value, like):
    return jets.Jet2.constant(value, like.v if isinstance(like, jets.Jet2) else like)


def _evaluate(node, zjet, length):
    if isinstance(node, Num):
        return _const(node.value, zjet)
    if isinstance(node, Name):
        if node.id == "z":
            return zjet
        return _const(length if node.id == "L" else math.pi, zjet)
    if isinstance(node, Neg):
        return -_evaluate(node.operand, zjet, length)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_evaluate(node.args[0], zjet, length))
    left = _evaluate(node.left, zjet, length)
    if node.op == "^":
        if not _depends_on_z(node.right):
            exponent = _evaluate(node.right, _const(0.0, 0.0), length).v
            return left.powc(float(exponent))
        return jets.exp(_evaluate(node.right, zjet, length) * jets.log(left))
    right = _evaluate(node.right, zjet, length)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left / right


@dataclass(frozen=True)
class ModeExpr:
    """A parsed cavity profile on ``(0, length)``."""

    ast: object
    source: str
    length: float
    name: str = None

    @property
    def is_constant(self):
        """True when the profile is flat inside the cavity (mesa-like)."""
        return not _depends_on_z(self.ast)

    def interior012(self, z):
        """``(u, u', u'')`` of the untruncated expression; gives one-sided limits at 0 and L."""
        zjet = jets.Jet2.variable(z)
        with np.errstate(all="ignore"):
            jet = _evaluate(self.ast, zjet, self.length)
        u, du, d2u = (np.broadcast_to(np.asarray(c, dtype=float), zjet.v.shape) for c in (jet.v, jet.d1, jet.d2))
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(du)) and np.all(np.isfinite(d2u))):
            raise DomainError(f"mode {self.source!r} is not finite on the requested points")
        if u.ndim == 0:
            return float(u), float(du), float(d2u)
        return u.copy(), du.copy(), d2u.copy()

    def __str__(self):
        return self.name or self.source


def parse(source, L):
    """Parse a mode expression or built-in name (mesa, sine, sine2, gauss, sech2)."""
    if not isinstance(source, str):
        raise TypeError("mode source must be text")
    L = float(L)
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"cavity length must be positive and finite, got {L!r}")
    key = source.strip()
    if key in BUILTINS:
        return ModeExpr(_Parser(BUILTINS[key]).parse(), key, L, name=key)
    if not key:
        raise ParseError("empty mode expression", 0)
    return ModeExpr(_Parser(source).parse(), source, L)


def eval012(mode, z):
    """``(u, u', u'')`` at ``z``; identically zero outside the open interval ``(0, L)``."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("z must be finite")
    inside = (z > 0) & (z < mode.length)
    if z.ndim == 0:
        if not inside:
            return 0.0, 0.0, 0.0
        return mode.interior012(float(z))
    out = [np.zeros_like(z) for _ in range(3)]
    if np.any(inside):
        vals = mode.interior012(z[inside])
        for o, v in zip(out, vals):
            o[inside] = v
    return tuple(out)
