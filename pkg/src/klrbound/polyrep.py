"""Faithful polynomial representation of R(nu), used as an independent oracle.

``R(nu)`` acts on ``PolyVector`` = direct sum over ``i`` in Seq(nu) of
``Q[x_1, ..., x_m] 1_i``.  Idempotents project, dots multiply, and a crossing
``psi_r`` on colours ``(u, v)`` (read below it) acts by

* the divided difference ``(f - s_r f) / (x_r - x_{r+1})`` when ``u == v``,
* ``s_r`` when ``u . v == 0`` or ``u < v`` with ``u . v == -1``,
* ``(x_r + x_{r+1}) s_r`` when ``u > v`` with ``u . v == -1``.

Nothing here calls the rewriting engine in :mod:`klrbound.algebra`.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping

from .algebra import Element, Monomial
from .quiver import A_INFINITY, CartanDatum, Seq

Poly = dict  # exps tuple -> Fraction


def poly_add(acc: Poly, other: Mapping, scale=1) -> Poly:
    for e, c in other.items():
        v = acc.get(e, 0) + c * scale
        if v:
            acc[e] = v
        else:
            acc.pop(e, None)
    return acc


def poly_mul_var(f: Mapping, r: int, power: int = 1) -> Poly:
    out = {}
    for e, c in f.items():
        e2 = list(e)
        e2[r - 1] += power
        out[tuple(e2)] = c
    return out


def poly_swap(f: Mapping, r: int) -> Poly:
    out = {}
    for e, c in f.items():
        e2 = list(e)
        e2[r - 1], e2[r] = e2[r], e2[r - 1]
        out[tuple(e2)] = c
    return out


def divided_difference(f: Mapping, r: int) -> Poly:
    """(f - s_r f) / (x_r - x_{r+1}), computed monomial by monomial."""
    out: Poly = {}
    for e, c in f.items():
        p, q = e[r - 1], e[r]
        if p == q:
            continue
        lo, n = min(p, q), abs(p - q)
        sign = 1 if p > q else -1
        # (x^p y^q - x^q y^p)/(x - y) = sign (xy)^lo h_{n-1}(x, y)
        for t in range(n):
            e2 = list(e)
            e2[r - 1] = lo + n - 1 - t
            e2[r] = lo + t
            poly_add(out, {tuple(e2): c * sign})
    return out


class PolyVector:
    """Map Seq(nu) -> polynomial in m commuting variables."""

    __slots__ = ("parts",)

    def __init__(self, parts: Mapping[Seq, Mapping] = ()):
        self.parts = {}
        for seq, f in dict(parts).items():
            f = {tuple(e): Fraction(c) for e, c in f.items() if c}
            if f:
                self.parts[tuple(seq)] = f

    @classmethod
    def unit(cls, seq: Seq) -> "PolyVector":
        return cls({seq: {(0,) * len(seq): 1}})

    def __eq__(self, other):
        return isinstance(other, PolyVector) and self.parts == other.parts

    def __add__(self, other: "PolyVector") -> "PolyVector":
        acc = {s: dict(f) for s, f in self.parts.items()}
        for s, f in other.parts.items():
            poly_add(acc.setdefault(s, {}), f)
        return PolyVector(acc)

    def is_zero(self) -> bool:
        return not self.parts

    def __repr__(self):
        return f"PolyVector({self.parts})"


def _crossing_action(f: Mapping, seq: Seq, r: int, datum: CartanDatum) -> Poly:
    u, v = seq[r - 1], seq[r]
    if u == v:
        return divided_difference(f, r)
    g = poly_swap(f, r)
    if datum.pair(u, v) == 0 or u < v:
        return g
    return poly_add(poly_mul_var(g, r), poly_mul_var(g, r + 1))


def monomial_action(mono: Monomial, f: Mapping, datum: CartanDatum = A_INFINITY) -> tuple[Seq, Poly]:
    """Apply ``psi_w x^a 1_i`` to ``f`` sitting in component ``i``."""
    g = dict(f)
    for r, a in enumerate(mono.exps, start=1):
        if a:
            g = poly_mul_var(g, r, a)
    seq = list(mono.seq)
    for k in reversed(mono.word):
        g = _crossing_action(g, tuple(seq), k, datum)
        seq[k - 1], seq[k] = seq[k], seq[k - 1]
    return tuple(seq), g


def poly_rep_apply(element: Element, vec: PolyVector, datum: CartanDatum = A_INFINITY) -> PolyVector:
    root = element.root
    if root is not None:
        for seq in vec.parts:
            if sorted(seq) != sorted(v for v, n in root.multiplicities for _ in range(n)):
                raise ValueError("vector and element have different nu")
    acc: dict[Seq, Poly] = {}
    for mono, c in element.terms.items():
        f = vec.parts.get(mono.seq)
        if not f:
            continue
        top, g = monomial_action(mono, f, datum)
        poly_add(acc.setdefault(top, {}), g, c)
    return PolyVector(acc)


def apply_generators(gens, seq: Seq, f: Mapping, datum: CartanDatum = A_INFINITY) -> tuple[Seq, Poly]:
    """Apply a word of generators ``("x", r)`` / ``("d", r)`` read top-down."""
    g = dict(f)
    s = list(seq)
    for kind, r in reversed(gens):
        if kind == "x":
            g = poly_mul_var(g, r)
        else:
            g = _crossing_action(g, tuple(s), r, datum)
            s[r - 1], s[r] = s[r], s[r - 1]
    return tuple(s), g


def random_poly(rng: random.Random, m: int, max_deg: int = 3, terms: int = 3) -> Poly:
    out: Poly = {}
    for _ in range(terms):
        e = [0] * m
        for _ in range(rng.randint(0, max_deg)):
            e[rng.randrange(m)] += 1
        poly_add(out, {tuple(e): Fraction(rng.randint(-3, 3))})
    return out
