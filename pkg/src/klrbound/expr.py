"""Text syntax for KLR elements.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (['*'] factor)*
    factor := atom ['^' INT]
    atom   := NUMBER ['/' NUMBER] | 'e(' INT (',' INT)* ')' | 'x(' INT ')'
            | 'd(' INT ')' | '(' expr ')'

A product is evaluated right to left: its rightmost factor must pin down an
idempotent, and every factor to the left acts on the result from above.
``x(r)`` is the dot on strand ``r`` and ``d(r)`` the crossing of strands
``r, r+1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import DEFAULT_ALGEBRA, Element, KLRAlgebra, Monomial, _add, _addall


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        self.line, self.col = line, col
        super().__init__(f"{msg} at line {line}, column {col}")


class IdempotentMismatch(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([edx])\b|([()*^+\-/,]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("num", m.group(1), start))
        elif m.group(2):
            toks.append(_Tok("name", m.group(2), start))
        else:
            toks.append(_Tok(m.group(3), m.group(3), start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _linecol(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        return ParseError(msg, *_linecol(self.text, tok.pos))

    def take(self, kind: str) -> _Tok:
        tok = self.peek()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        terms = []
        sign = 1
        if self.peek().kind == "-":
            self.take("-")
            sign = -1
        terms.append((sign, self.term()))
        while self.peek().kind in "+-":
            sign = 1 if self.take(self.peek().kind).kind == "+" else -1
            terms.append((sign, self.term()))
        return ("sum", terms)

    def term(self):
        factors = [self.factor()]
        while True:
            kind = self.peek().kind
            if kind == "*":
                self.take("*")
                factors.append(self.factor())
            elif kind in ("num", "name", "("):
                factors.append(self.factor())
            else:
                return ("prod", factors)

    def factor(self):
        node = self.atom()
        if self.peek().kind == "^":
            self.take("^")
            node = ("pow", node, int(self.take("num").text))
        return node

    def signed_int(self) -> int:
        sign = 1
        if self.peek().kind == "-":
            self.take("-")
            sign = -1
        return sign * int(self.take("num").text)

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.take("num")
            value = Fraction(int(tok.text))
            if self.peek().kind == "/":
                self.take("/")
                den = self.take("num")
                if int(den.text) == 0:
                    raise self.error("division by zero", den)
                value /= int(den.text)
            return ("num", value)
        if tok.kind == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        if tok.kind == "name":
            self.take("name")
            self.take("(")
            if tok.text == "e":
                seq = [self.signed_int()]
                while self.peek().kind == ",":
                    self.take(",")
                    seq.append(self.signed_int())
                self.take(")")
                return ("e", tuple(seq), tok)
            r = self.signed_int()
            self.take(")")
            if r < 1:
                raise self.error(f"strand index must be >= 1, got {r}", tok)
            return (tok.text, r, tok)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")


class _Evaluator:
    def __init__(self, text: str, algebra: KLRAlgebra, allow_mismatch: bool):
        self.text = text
        self.algebra = algebra
        self.allow_mismatch = allow_mismatch

    def fail(self, msg: str, tok: _Tok):
        return ParseError(msg, *_linecol(self.text, tok.pos))

    def apply(self, node, below: Element | None) -> Element:
        kind = node[0]
        if kind == "sum":
            total = None
            for sign, term in node[1]:
                val = self.apply(term, below)
                if sign < 0:
                    val = -val
                total = val if total is None else total + val
            return total
        if kind == "prod":
            cur = below
            for factor in reversed(node[1]):
                cur = self.apply(factor, cur)
            return cur
        if kind == "pow":
            _, inner, n = node
            cur = below
            if n == 0 and cur is None:
                raise ValueError("x^0 needs an idempotent to its right")
            for _ in range(n):
                cur = self.apply(inner, cur)
            return cur
        if kind == "num":
            if below is None:
                if node[1] == 0:
                    return Element.zero()
                raise ValueError("a scalar needs an idempotent to its right")
            return below.scale(node[1])
        if kind == "e":
            seq, tok = node[1], node[2]
            if below is None:
                return Element.monomial(Monomial(seq, (0,) * len(seq), ()))
            kept = {m: c for m, c in below.terms.items() if m.target == seq}
            if len(kept) != len(below.terms) and not self.allow_mismatch:
                raise IdempotentMismatch(
                    f"idempotent e{seq} does not match the element below it "
                    f"(line {_linecol(self.text, tok.pos)[0]}, column {_linecol(self.text, tok.pos)[1]})")
            return Element(kept)
        r, tok = node[1], node[2]
        if below is None:
            raise self.fail(f"{kind}({r}) needs an idempotent to its right", tok)
        acc: dict = {}
        for mono, c in below.terms.items():
            m = len(mono.seq)
            if kind == "x":
                if r > m:
                    raise self.fail(f"dot on strand {r} but only {m} strands", tok)
                _addall(acc, self.algebra.lmul_x(r, mono), c)
            else:
                if r >= m:
                    raise self.fail(f"crossing at {r} needs at least {r + 1} strands", tok)
                _addall(acc, self.algebra.lmul_psi(r, mono), c)
        return Element(acc)


def parse_expression(text: str, allow_mismatch: bool = False,
                     algebra: KLRAlgebra = DEFAULT_ALGEBRA) -> Element:
    tree = _Parser(text).parse()
    result = _Evaluator(text, algebra, allow_mismatch).apply(tree, None)
    if result is None:
        raise ParseError("empty expression", 1, 1)
    return result


def format_monomial(mono: Monomial) -> str:
    parts = [f"d({k})" for k in mono.word]
    for r, a in enumerate(mono.exps, start=1):
        if a == 1:
            parts.append(f"x({r})")
        elif a > 1:
            parts.append(f"x({r})^{a}")
    parts.append("e(" + ",".join(str(v) for v in mono.seq) + ")")
    return "*".join(parts)


def format_element(element: Element) -> str:
    if element.is_zero():
        return "0"
    out = []
    for k, (mono, c) in enumerate(element):
        neg = c < 0
        mag = -c if neg else c
        body = format_monomial(mono)
        if mag != 1:
            body = f"{mag}*{body}"
        if k == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
