"""Parser for edge-weight expressions.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' unary)?          # exponent: nonnegative integer
    atom    := INT | INT 'i' | 'i' | 'l' | '(' expr ')'

``l`` is the spectral variable and ``i`` the imaginary unit, so ``3/2``,
``1+2i`` and ``(l+1)/l`` are all valid.  The implementation is a small
precedence-climbing loop rather than one function per grammar level.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import IsospecError, ParseError
from .ratfun import LAMBDA, RatFunc, gauss

__all__ = ["parse_weight", "format_weight"]

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)(?P<imag>i)?|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")

_BINARY = {"+": (1, "left"), "-": (1, "left"), "*": (2, "left"), "/": (2, "left"), "^": (4, "right")}
_UNARY_PREC = 3
_ATOM_START = frozenset({"integer", "imaginary", "i", "l", "(", "-", "+"})


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'imag', 'l', 'i', 'op', 'end'
    text: str
    pos: int


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            rest = src[pos:]
            if not rest.strip():
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise ParseError(f"unexpected character {src[bad]!r}", bad, _ATOM_START)
        start = m.start(m.lastgroup) if m.lastgroup != "imag" else m.start("num")
        if m.group("num") is not None:
            kind = "imag" if m.group("imag") else "num"
            toks.append(_Tok(kind, m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            name = m.group("name")
            if name not in ("l", "i"):
                raise ParseError(f"unknown name {name!r}", m.start("name"), frozenset({"l", "i"}))
            toks.append(_Tok(name, name, m.start("name")))
        else:
            toks.append(_Tok("op", m.group("op"), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> RatFunc:
        value = self.expr(1)
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.text!r}", self.tok.pos,
                             frozenset({"+", "-", "*", "/", "^", "end of input"}))
        return value

    def expr(self, min_prec: int) -> RatFunc:
        lhs = self.unary()
        while self.tok.kind == "op" and self.tok.text in _BINARY:
            op = self.tok
            prec, assoc = _BINARY[op.text]
            if prec < min_prec:
                break
            self.advance()
            rhs = self.expr(prec + 1 if assoc == "left" else prec)
            lhs = self.apply(op, lhs, rhs)
        return lhs

    def unary(self) -> RatFunc:
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.advance()
            operand = self.expr(_UNARY_PREC)
            return -operand if t.text == "-" else operand
        return self.atom()

    def atom(self) -> RatFunc:
        t = self.advance()
        if t.kind == "num":
            return RatFunc.const(mpq(int(t.text)))
        if t.kind == "imag":
            return RatFunc.const(gauss(mpq(0), mpq(int(t.text))))
        if t.kind == "i":
            return RatFunc.const(gauss(mpq(0), mpq(1)))
        if t.kind == "l":
            return LAMBDA
        if t.kind == "op" and t.text == "(":
            inner = self.expr(1)
            close = self.advance()
            if close.kind != "op" or close.text != ")":
                raise ParseError("unbalanced parenthesis", close.pos, frozenset({")", "operator"}))
            return inner
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.pos, _ATOM_START)

    def apply(self, op: _Tok, a: RatFunc, b: RatFunc) -> RatFunc:
        if op.text == "+":
            return a + b
        if op.text == "-":
            return a - b
        if op.text == "*":
            return a * b
        if op.text == "/":
            if not b:
                raise ParseError("division by zero", op.pos)
            return a / b
        # '^'
        if not b.is_constant():
            raise ParseError("exponent must be a nonnegative integer", op.pos, frozenset({"integer"}))
        k = b.constant_value()
        if not isinstance(k, type(mpq(0))) or k.denominator != 1 or k < 0:
            raise ParseError("exponent must be a nonnegative integer", op.pos, frozenset({"integer"}))
        return a ** int(k)


def parse_weight(expr: str) -> RatFunc:
    """Parse a weight expression into its canonical rational function.

    >>> str(parse_weight("1/(l-1) + 1/(l-1)"))
    '2/(l-1)'
    """
    if not isinstance(expr, str):
        raise TypeError("weight expression must be a string")
    try:
        return _Parser(expr).parse()
    except ParseError:
        raise
    except IsospecError as exc:  # pragma: no cover - arithmetic errors surface as parse errors
        raise ParseError(str(exc), 0) from exc


def format_weight(w: RatFunc) -> str:
    """Canonical string; inverse of :func:`parse_weight`."""
    return str(w)
