"""Exact arithmetic in the KLR algebra R(nu) of a simply-laced quiver.

Every element is a finite combination of normal-form monomials
``psi_w x^a 1_i``: an idempotent ``1_i`` at the bottom, dots ``x^a`` above
it, then crossings following the lexicographically smallest reduced word of
``w``.  ``A * B`` stacks ``A`` on top of ``B``.

Words are tuples of 1-indexed crossing positions read from the top down, so
``(k1, ..., kn)`` stands for ``psi_{k1} ... psi_{kn}``.  A permutation is
stored as a tuple ``perm`` with ``perm[p]`` the bottom index (0-based) of the
strand ending at top index ``p``.

Local rewriting rules used (colours read just below the generator):

* ``psi_k psi_k`` is 0, 1, or ``x_k + x_{k+1}`` for equal, distant and
  adjacent colours;
* ``x_k psi_k = psi_k x_{k+1} + 1`` and ``x_{k+1} psi_k = psi_k x_k - 1`` for
  equal colours, plain dot slides otherwise;
* ``psi_k psi_{k+1} psi_k = psi_{k+1} psi_k psi_{k+1} + 1`` on colours
  ``(i, j, i)`` with ``i . j = -1``, an exact braid move otherwise.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, NamedTuple, Sequence

from .quiver import (A_INFINITY, CapExceeded, CartanDatum, DEFAULT_SEQUENCE_CAP,
                     RootSpec, Seq, enumerate_sequences)


# -- permutations and words ---------------------------------------------------

def perm_of_word(word: Sequence[int], m: int) -> tuple[int, ...]:
    perm = list(range(m))
    for k in reversed(word):
        perm[k - 1], perm[k] = perm[k], perm[k - 1]
    return tuple(perm)


def inversions(perm: Sequence[int]) -> int:
    m = len(perm)
    return sum(1 for p in range(m) for q in range(p + 1, m) if perm[p] > perm[q])


def canonical_word(perm: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically smallest reduced word of ``perm``."""
    perm = list(perm)
    word = []
    while True:
        for k in range(1, len(perm)):
            if perm[k - 1] > perm[k]:
                word.append(k)
                perm[k - 1], perm[k] = perm[k], perm[k - 1]
                break
        else:
            return tuple(word)


def is_reduced(word: Sequence[int], m: int) -> bool:
    return inversions(perm_of_word(word, m)) == len(word)


def apply_word(seq: Seq, word: Sequence[int]) -> Seq:
    """Colours at the top of ``psi_word 1_seq``."""
    s = list(seq)
    for k in reversed(word):
        s[k - 1], s[k] = s[k], s[k - 1]
    return tuple(s)


# -- monomials ----------------------------------------------------------------

class Monomial(NamedTuple):
    seq: Seq
    exps: tuple[int, ...]
    word: tuple[int, ...]

    @property
    def target(self) -> Seq:
        return apply_word(self.seq, self.word)

    @property
    def perm(self) -> tuple[int, ...]:
        return perm_of_word(self.word, len(self.seq))

    def degree(self, datum: CartanDatum = A_INFINITY) -> int:
        return monomial_degree(self, datum)


def monomial_degree(mono: Monomial, datum: CartanDatum = A_INFINITY) -> int:
    perm = perm_of_word(mono.word, len(mono.seq))
    return 2 * sum(mono.exps) + crossing_degree(mono.seq, perm, datum)


def crossing_degree(seq: Seq, perm: Sequence[int], datum: CartanDatum = A_INFINITY) -> int:
    m = len(perm)
    total = 0
    for p in range(m):
        for q in range(p + 1, m):
            if perm[p] > perm[q]:
                total -= datum.pair(seq[perm[p]], seq[perm[q]])
    return total


def _add(acc: dict, mono, coeff) -> None:
    c = acc.get(mono, 0) + coeff
    if c:
        acc[mono] = c
    else:
        acc.pop(mono, None)


def _addall(acc: dict, items, scale=1) -> None:
    for mono, c in items:
        _add(acc, mono, c * scale)


class KLRAlgebra:
    """Normal-form rewriting for one Cartan datum, with compute-once caches."""

    def __init__(self, datum: CartanDatum = A_INFINITY):
        self.datum = datum
        self._front: dict = {}
        self._canon: dict = {}
        self._lx: dict = {}
        self._lp: dict = {}
        self._mul: dict = {}

    # braid-move bookkeeping ---------------------------------------------------

    def _braid_correction(self, seq: Seq, rest: tuple, low: int) -> int:
        """psi_low psi_low+1 psi_low - psi_low+1 psi_low psi_low+1 on the colours below."""
        below = apply_word(seq, rest)
        u, v, w = below[low - 1], below[low], below[low + 1]
        if u == w and self.datum.pair(u, v) == -1:
            return 1
        return 0

    def bring_front(self, word: tuple, c: int, seq: Seq):
        """Rewrite a reduced word so it starts with the left descent ``c``.

        Returns ``(new_word, corrections)`` with
        ``psi_word = psi_new_word + sum(coeff * psi_cw)`` on ``1_seq``.
        """
        key = (word, c, seq)
        hit = self._front.get(key)
        if hit is not None:
            return hit
        a = word[0]
        if a == c:
            out = (word, ())
        elif abs(a - c) >= 2:
            v, corr = self.bring_front(word[1:], c, seq)
            out = ((c, a) + v[1:], tuple((k, (a,) + cw) for k, cw in corr))
        else:
            v1, corr1 = self.bring_front(word[1:], c, seq)
            v2, corr2 = self.bring_front(v1[1:], a, seq)
            rest = v2[1:]
            corr = [(k, (a,) + cw) for k, cw in corr1]
            corr += [(k, (a, c) + cw) for k, cw in corr2]
            low = min(a, c)
            delta = self._braid_correction(seq, rest, low)
            if delta:
                corr.append((delta if a == low else -delta, rest))
            out = ((c, a, c) + rest, tuple(corr))
        self._front[key] = out
        return out

    def canonicalize(self, word: tuple, seq: Seq):
        """For a reduced word: ``(canonical, corrections)`` as in :meth:`bring_front`."""
        key = (word, seq)
        hit = self._canon.get(key)
        if hit is not None:
            return hit
        target = canonical_word(perm_of_word(word, len(seq)))
        corr = []
        tail = word
        for t, c in enumerate(target):
            tail, cc = self.bring_front(tail, c, seq)
            prefix = target[:t]
            corr.extend((k, prefix + cw) for k, cw in cc)
            tail = tail[1:]
        out = (target, tuple(corr))
        self._canon[key] = out
        return out

    # normal forms -------------------------------------------------------------

    def nf_word(self, word: tuple, exps: tuple, seq: Seq) -> dict:
        """Normal form of ``psi_word x^exps 1_seq`` for an arbitrary word."""
        acc: dict = {}
        m = len(seq)
        if is_reduced(word, m):
            canon, corr = self.canonicalize(word, seq)
            acc[Monomial(seq, exps, canon)] = 1
            for k, cw in corr:
                _addall(acc, self.nf_word(cw, exps, seq).items(), k)
            return acc
        cur = {Monomial(seq, exps, ()): 1}
        for k in reversed(word):
            nxt: dict = {}
            for mono, c in cur.items():
                _addall(nxt, self.lmul_psi(k, mono), c)
            cur = nxt
        return cur

    def lmul_x(self, r: int, mono: Monomial):
        """Normal form of ``x_r * mono`` as a tuple of (monomial, coeff)."""
        key = (r, mono)
        hit = self._lx.get(key)
        if hit is not None:
            return hit
        seq, exps, word = mono
        acc: dict = {}
        if not word:
            e = list(exps)
            e[r - 1] += 1
            acc[Monomial(seq, tuple(e), word)] = 1
        else:
            k = word[0]
            rest = Monomial(seq, exps, word[1:])
            below = apply_word(seq, word[1:])
            same = below[k - 1] == below[k]
            if r == k:
                r2, corr = k + 1, (1 if same else 0)
            elif r == k + 1:
                r2, corr = k, (-1 if same else 0)
            else:
                r2, corr = r, 0
            for m2, c in self.lmul_x(r2, rest):
                _addall(acc, self.lmul_psi(k, m2), c)
            if corr:
                _add(acc, rest, corr)
        out = tuple(acc.items())
        self._lx[key] = out
        return out

    def lmul_psi(self, k: int, mono: Monomial):
        """Normal form of ``psi_k * mono`` as a tuple of (monomial, coeff)."""
        key = (k, mono)
        hit = self._lp.get(key)
        if hit is not None:
            return hit
        seq, exps, word = mono
        perm = perm_of_word(word, len(seq))
        acc: dict = {}
        if perm[k - 1] < perm[k]:
            acc = self.nf_word((k,) + word, exps, seq)
        else:
            v, corr = self.bring_front(word, k, seq)
            for coeff, cw in corr:
                _addall(acc, self.nf_word((k,) + cw, exps, seq).items(), coeff)
            rest = v[1:]
            below = apply_word(seq, rest)
            u, w = below[k - 1], below[k]
            if u != w:
                base = self.nf_word(rest, exps, seq)
                if self.datum.pair(u, w) == 0:
                    _addall(acc, base.items())
                else:
                    for m2, c in base.items():
                        _addall(acc, self.lmul_x(k, m2), c)
                        _addall(acc, self.lmul_x(k + 1, m2), c)
        out = tuple(acc.items())
        self._lp[key] = out
        return out

    def mul_monomials(self, top: Monomial, bottom: Monomial):
        """Normal form of ``top * bottom`` (zero unless the idempotents match)."""
        if bottom.target != top.seq:
            return ()
        key = (top, bottom)
        hit = self._mul.get(key)
        if hit is not None:
            return hit
        cur = {bottom: 1}
        for r, e in enumerate(top.exps, start=1):
            for _ in range(e):
                nxt: dict = {}
                for mono, c in cur.items():
                    _addall(nxt, self.lmul_x(r, mono), c)
                cur = nxt
        for k in reversed(top.word):
            nxt = {}
            for mono, c in cur.items():
                _addall(nxt, self.lmul_psi(k, mono), c)
            cur = nxt
        out = tuple(cur.items())
        self._mul[key] = out
        return out

    def cache_sizes(self) -> dict[str, int]:
        return {"front": len(self._front), "canon": len(self._canon), "lmul_x": len(self._lx),
                "lmul_psi": len(self._lp), "mul": len(self._mul)}


DEFAULT_ALGEBRA = KLRAlgebra(A_INFINITY)


# -- elements -----------------------------------------------------------------

def _frac(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Element:
    """A finite exact linear combination of normal-form monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | Iterable = ()):
        clean: dict[Monomial, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for mono, c in items:
            _add(clean, Monomial(*mono), _frac(c))
        roots = {tuple(sorted(m.seq)) for m in clean}
        if len(roots) > 1:
            raise ValueError("all monomials of an element must share nu")
        self.terms = clean

    @classmethod
    def zero(cls) -> "Element":
        return cls()

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1) -> "Element":
        return cls({mono: coeff})

    @property
    def root(self) -> RootSpec | None:
        for mono in self.terms:
            return RootSpec.of(mono.seq)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, Element):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def _check_root(self, other: "Element") -> None:
        a, b = self.root, other.root
        if a is not None and b is not None and a != b:
            raise ValueError(f"mismatched nu: {a.to_json()} vs {b.to_json()}")

    def __add__(self, other: "Element") -> "Element":
        self._check_root(other)
        acc = dict(self.terms)
        _addall(acc, other.terms.items())
        return Element(acc)

    def __neg__(self) -> "Element":
        return Element({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def scale(self, c) -> "Element":
        c = _frac(c)
        if not c:
            return Element()
        return Element({m: v * c for m, v in self.terms.items()})

    def __rmul__(self, c) -> "Element":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return self.scale(other)

    def __pow__(self, n: int) -> "Element":
        if n < 1:
            raise ValueError("only positive powers are defined; use the idempotent for n = 0")
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def times_dots_below(self, exps: Sequence[int]) -> "Element":
        """Right multiplication by ``x^exps`` on the bottom idempotent (exact shift)."""
        return Element({Monomial(m.seq, tuple(a + b for a, b in zip(m.exps, exps)), m.word): c
                        for m, c in self.terms.items()})

    def degrees(self, datum: CartanDatum = A_INFINITY) -> set[int]:
        return {monomial_degree(m, datum) for m in self.terms}

    def is_homogeneous(self, datum: CartanDatum = A_INFINITY) -> bool:
        return len(self.degrees(datum)) <= 1

    def components(self, datum: CartanDatum = A_INFINITY) -> dict[tuple[Seq, Seq, int], "Element"]:
        """Split into homogeneous block components keyed by (bottom, top, degree)."""
        parts: dict = {}
        for m, c in self.terms.items():
            parts.setdefault((m.seq, m.target, monomial_degree(m, datum)), {})[m] = c
        return {k: Element(v) for k, v in sorted(parts.items())}

    def to_json(self) -> list[dict]:
        out = []
        for m, c in self:
            out.append({"word": list(m.word), "exps": list(m.exps), "seq": list(m.seq),
                        "coeff": f"{c.numerator}/{c.denominator}"})
        return out

    @classmethod
    def from_json(cls, data: list[dict]) -> "Element":
        terms = []
        for t in data:
            seq = tuple(t["seq"])
            word = tuple(t["word"])
            if canonical_word(perm_of_word(word, len(seq))) != word:
                raise ValueError(f"word {word} is not a canonical reduced word")
            terms.append((Monomial(seq, tuple(t["exps"]), word), Fraction(t["coeff"])))
        return cls(terms)

    def __str__(self):
        from .expr import format_element
        return format_element(self)

    def __repr__(self):
        return f"Element({self})"


def multiply(a: Element, b: Element, algebra: KLRAlgebra = DEFAULT_ALGEBRA) -> Element:
    a._check_root(b)
    acc: dict = {}
    by_target: dict[Seq, list] = {}
    for mb, cb in b.terms.items():
        by_target.setdefault(mb.target, []).append((mb, cb))
    for ma, ca in a.terms.items():
        for mb, cb in by_target.get(ma.seq, ()):
            _addall(acc, algebra.mul_monomials(ma, mb), ca * cb)
    return Element(acc)


# -- generators ---------------------------------------------------------------

def _check_pos(r: int, lo: int, hi: int, what: str) -> None:
    if not lo <= r <= hi:
        raise IndexError(f"{what} position {r} out of range {lo}..{hi}")


def idempotent(seq: Sequence[int]) -> Element:
    seq = tuple(seq)
    return Element.monomial(Monomial(seq, (0,) * len(seq), ()))


def dot(r: int, seq: Sequence[int], power: int = 1) -> Element:
    seq = tuple(seq)
    _check_pos(r, 1, len(seq), "dot")
    e = [0] * len(seq)
    e[r - 1] = power
    return Element.monomial(Monomial(seq, tuple(e), ()))


def crossing(r: int, seq: Sequence[int]) -> Element:
    seq = tuple(seq)
    _check_pos(r, 1, len(seq) - 1, "crossing")
    return Element.monomial(Monomial(seq, (0,) * len(seq), (r,)))


def degree(mono: Monomial, datum: CartanDatum = A_INFINITY) -> int:
    return monomial_degree(mono, datum)


# -- transition elements and dot sums -------------------------------------------

def minimal_perm(bottom: Sequence[int], top: Sequence[int]) -> tuple[int, ...]:
    """Shortest permutation carrying ``bottom`` to ``top``: equal colours never cross."""
    if sorted(bottom) != sorted(top):
        raise ValueError(f"{tuple(top)} is not a rearrangement of {tuple(bottom)}")
    slots: dict[int, list[int]] = {}
    for idx, v in enumerate(bottom):
        slots.setdefault(v, []).append(idx)
    perm = []
    for v in top:
        perm.append(slots[v].pop(0))
    return tuple(perm)


def minimal_transition(bottom: Sequence[int], top: Sequence[int]) -> Element:
    """The element {}_top 1_bottom."""
    bottom = tuple(bottom)
    perm = minimal_perm(bottom, top)
    return Element.monomial(Monomial(bottom, (0,) * len(bottom), canonical_word(perm)))


def compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def symmetric_dot_sum(seq: Sequence[int], r: int, s: int, a: int) -> Element:
    """Sum of x_{r+1}^l1 ... x_{r+s}^ls 1_seq over l1 + ... + ls = a - (s - 1)."""
    seq = tuple(seq)
    if s < 1 or r < 0 or r + s > len(seq):
        raise IndexError("run does not fit in the sequence")
    run = seq[r:r + s]
    if len(set(run)) != 1:
        raise ValueError(f"run {run} is not identically coloured")
    if a < s - 1:
        raise ValueError("need a >= s - 1")
    terms = {}
    for ls in compositions(a - (s - 1), s):
        e = [0] * len(seq)
        e[r:r + s] = ls
        terms[Monomial(seq, tuple(e), ())] = 1
    return Element(terms)


# -- graded enumeration -------------------------------------------------------

def perms_between(bottom: Seq, top: Seq) -> list[tuple[int, ...]]:
    """All permutations carrying the colours of ``bottom`` to ``top``."""
    if sorted(bottom) != sorted(top):
        return []
    slots: dict[int, list[int]] = {}
    for idx, v in enumerate(bottom):
        slots.setdefault(v, []).append(idx)
    colours = sorted(slots)
    top_slots = {v: [p for p, c in enumerate(top) if c == v] for v in colours}
    out = []

    def rec(ci: int, perm: list[int]):
        if ci == len(colours):
            out.append(tuple(perm))
            return
        v = colours[ci]
        for arr in permutations(slots[v]):
            for p, b in zip(top_slots[v], arr):
                perm[p] = b
            rec(ci + 1, perm)

    rec(0, [0] * len(bottom))
    return sorted(out)


def graded_monomials(nu: RootSpec, bottom: Seq, top: Seq, d: int,
                     cap: int = DEFAULT_SEQUENCE_CAP,
                     datum: CartanDatum = A_INFINITY) -> list[Monomial]:
    if nu.length > cap:
        raise CapExceeded("|nu|", nu.length, cap)
    bottom, top = tuple(bottom), tuple(top)
    if RootSpec.of(bottom) != nu or RootSpec.of(top) != nu:
        raise ValueError("bottom/top are not sequences of nu")
    m = len(bottom)
    out = []
    for perm in perms_between(bottom, top):
        rem = d - crossing_degree(bottom, perm, datum)
        if rem < 0 or rem % 2:
            continue
        word = canonical_word(perm)
        for exps in compositions(rem // 2, m):
            out.append(Monomial(bottom, exps, word))
    return sorted(out)


# -- random elements for property tests ----------------------------------------

def random_generator_word(rng: random.Random, seq: Seq, length: int) -> Element:
    """Product of random dots and crossings on top of ``1_seq``."""
    out = idempotent(seq)
    m = len(seq)
    top = seq
    for _ in range(length):
        if m > 1 and rng.random() < 0.5:
            k = rng.randint(1, m - 1)
            out = crossing(k, top) * out
            top = apply_word(top, (k,))
        else:
            out = dot(rng.randint(1, m), top) * out
    return out
