"""A tiny arithmetic language for potentials and seeds, e.g. ``a*x^alpha``.

Grammar (see ``docs/grammar.md``)::

    expr    = term   { ("+" | "-") term } ;
    term    = unary  { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = primary [ "^" unary ] ;
    primary = number | "x" | ident | call | "(" expr ")" ;
    call    = ("exp" | "ln") "(" expr ")" | "pow" "(" expr "," expr ")" ;

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``, and it is
right associative.  Identifiers other than ``x`` are free parameters bound at
evaluation time.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DomainError, ParseError, UnboundParameterError
from .qlattice import LatticeFn, QGrid, exp, log

__all__ = [
    "Expr", "Num", "Var", "Param", "Neg", "BinOp", "Call",
    "parse", "evaluate", "evaluate_array", "sample", "to_source",
]

FUNCTIONS = {"exp": 1, "ln": 1, "pow": 2}


class Expr:
    """Base class of the immutable syntax tree."""

    @property
    def parameters(self) -> frozenset:
        return frozenset()

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Param(Expr):
    name: str

    @property
    def parameters(self):
        return frozenset([self.name])


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    @property
    def parameters(self):
        return self.operand.parameters


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def parameters(self):
        return self.left.parameters | self.right.parameters


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple

    @property
    def parameters(self):
        out = frozenset()
        for a in self.args:
            out |= a.parameters
        return out


# -- tokenizer ------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = len(src) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[bad]!r}", _byte_offset(src, bad))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


def _byte_offset(src, pos):
    return len(src[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", _byte_offset(self.src, t.pos), expected)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            self.fail({repr(text)})

    def parse(self):
        e = self.expr()
        if self.tok.kind != "end":
            self.fail({"operator", "end of input"})
        return e

    def expr(self):
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.accept("^"):
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if t.kind == "ident":
            self.i += 1
            if self.accept("("):
                if t.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {t.text!r}", _byte_offset(self.src, t.pos), set(FUNCTIONS))
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                if len(args) != FUNCTIONS[t.text]:
                    raise ParseError(
                        f"{t.text} takes {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                        _byte_offset(self.src, t.pos),
                    )
                return Call(t.text, tuple(args))
            if t.text in FUNCTIONS:
                self.fail({"'('"})
            return Var() if t.text == "x" else Param(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.fail({"number", "identifier", "'('", "'-'"})


def parse(src: str) -> Expr:
    """Parse expression text into a syntax tree.

    Raises
    ------
    ParseError
        With the UTF-8 byte offset of the offending token and the set of
        tokens that would have been accepted there.
    """
    return _Parser(src).parse()


def to_source(e: Expr) -> str:
    """Fully parenthesized text that parses back to an equivalent tree."""
    if isinstance(e, Num):
        r = repr(float(e.value))
        return f"({r})" if r.startswith("-") else r
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}(" + ", ".join(to_source(a) for a in e.args) + ")"
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation -----------------------------------------------------------------

def _first_bad(mask):
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim == 0:
        return None if not mask else -1
    bad = np.flatnonzero(mask)
    return int(bad[0]) if bad.size else None


def _raise_if(mask, message):
    idx = _first_bad(mask)
    if idx is not None:
        raise DomainError(message, index=None if idx < 0 else idx)


def _finite(v):
    if isinstance(v, np.ndarray) and v.dtype == object:
        return np.array([bool(e.context.isfinite(e)) for e in v.ravel()]).reshape(v.shape)
    if not isinstance(v, np.ndarray) and hasattr(v, "context"):
        return bool(v.context.isfinite(v))
    return np.isfinite(v)


def _power(b, e):
    with np.errstate(invalid="ignore"):
        fractional = e % 1 != 0
    _raise_if((b < 0) & fractional, "negative base with non-integer exponent")
    _raise_if((b == 0) & (e < 0), "zero raised to a negative power")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return b**e


def _eval(e, x, params, real):
    if isinstance(e, Num):
        return real(e.value)
    if isinstance(e, Var):
        return x
    if isinstance(e, Param):
        try:
            return real(params[e.name])
        except KeyError:
            raise UnboundParameterError(e.name) from None
    if isinstance(e, Neg):
        return -_eval(e.operand, x, params, real)
    if isinstance(e, BinOp):
        a = _eval(e.left, x, params, real)
        b = _eval(e.right, x, params, real)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            _raise_if(b == 0, "division by zero")
            with np.errstate(over="ignore"):
                return a / b
        return _power(a, b)
    if isinstance(e, Call):
        args = [_eval(a, x, params, real) for a in e.args]
        if e.func == "exp":
            with np.errstate(over="ignore"):
                return exp(args[0])
        if e.func == "ln":
            _raise_if(args[0] <= 0, "logarithm of a non-positive number")
            return log(args[0])
        return _power(*args)
    raise TypeError(f"not an expression node: {e!r}")


def _checked(result):
    _raise_if(~np.asarray(_finite(result)), "non-finite value (overflow)")
    return result


def evaluate(e: Expr, x: float, params: Mapping[str, float] | None = None) -> float:
    """Evaluate ``e`` at a single point in IEEE double arithmetic.

    Raises
    ------
    UnboundParameterError
        If a free identifier has no binding in ``params``.
    DomainError
        For ``ln`` of a non-positive value, division by zero, ``0^negative``,
        a negative base with non-integer exponent, or overflow.
    """
    x = np.float64(x)
    return float(_checked(_eval(e, x, params or {}, np.float64)))


def evaluate_array(e: Expr, xs, params: Mapping[str, float] | None = None) -> np.ndarray:
    """Evaluate ``e`` at every entry of ``xs`` (float64).  Errors carry the array index."""
    params = params or {}
    missing = e.parameters - set(params)
    if missing:
        raise UnboundParameterError(sorted(missing)[0])
    xs = np.asarray(xs, dtype=float)
    vals = _checked(_eval(e, xs, params, np.float64))
    return np.array(np.broadcast_to(vals, xs.shape), dtype=float)


def sample(e: Expr, grid: QGrid, params: Mapping[str, float] | None = None) -> LatticeFn:
    """Evaluate ``e`` at every grid point.  Domain errors carry the lattice index."""
    params = params or {}
    missing = e.parameters - set(params)
    if missing:
        raise UnboundParameterError(sorted(missing)[0])
    pts = grid.points
    vals = _checked(_eval(e, pts, params, grid.real))
    vals = np.broadcast_to(vals, pts.shape)
    return LatticeFn(grid, grid.asarray(vals) if grid.multiprecision else np.array(vals, dtype=float))
