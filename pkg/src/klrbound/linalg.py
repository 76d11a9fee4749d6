"""Incremental row spaces over Q (fraction-free) or over a prime field.

Vectors are sparse dicts ``column -> value`` with integer columns.  Rows are
kept in semi-echelon form: every stored row has a distinct pivot equal to
its smallest nonzero column.  Exact rows are primitive integer vectors with
positive pivot; membership tests reduce by cross-multiplication, so no
fractions appear until :meth:`RowSpace.rref` is asked for.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

DEFAULT_PRIME = 2_147_483_647  # 2^31 - 1


def parse_field(spec: str) -> int | None:
    """``"exact"`` -> None, ``"prime:P"`` -> P."""
    if spec == "exact":
        return None
    if spec.startswith("prime:"):
        p = int(spec.split(":", 1)[1])
        if p < 2 ** 20:
            raise ValueError("prime field mode needs a prime >= 2^20")
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return p
    raise ValueError(f"unknown field {spec!r}; use 'exact' or 'prime:P'")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _integerize(vec: Mapping[int, object]) -> dict[int, int]:
    """Scale a rational vector to a primitive integer one."""
    den = 1
    for v in vec.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for k, v in vec.items():
        iv = v * den
        if isinstance(iv, Fraction):
            iv = iv.numerator
        if iv:
            out[k] = int(iv)
    return _primitive(out)


def _primitive(vec: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in vec.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        vec = {k: v // g for k, v in vec.items()}
    if vec and vec[min(vec)] < 0:
        vec = {k: -v for k, v in vec.items()}
    return vec


class RowSpace:
    """Span of a growing set of rows, with exact or modular arithmetic."""

    def __init__(self, prime: int | None = None):
        self.prime = prime
        self.rows: dict[int, dict[int, int]] = {}   # pivot -> row
        self.seen = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _prepare(self, vec: Mapping[int, object]) -> dict[int, int]:
        if self.prime is None:
            return _integerize(vec)
        p = self.prime
        out = {}
        for k, v in vec.items():
            if isinstance(v, Fraction):
                iv = v.numerator * pow(v.denominator, -1, p) % p
            else:
                iv = int(v) % p
            if iv:
                out[k] = iv
        return out

    def reduce(self, vec: Mapping[int, object]) -> dict[int, int]:
        """Residual of ``vec`` after elimination; empty iff it lies in the span."""
        v = self._prepare(vec)
        rows = self.rows
        p = self.prime
        while v:
            c = min(v)
            if c not in rows:
                # smallest column is free: nothing can cancel it any more
                return v
            row = rows[c]
            a = v[c]
            if p is None:
                b = row[c]
                g = gcd(a, b)
                fa, fb = b // g, a // g
                new = {k: x * fa for k, x in v.items()}
                for k, x in row.items():
                    y = new.get(k, 0) - fb * x
                    if y:
                        new[k] = y
                    else:
                        new.pop(k, None)
                v = _primitive(new) if new else new
            else:
                for k, x in row.items():
                    y = (v.get(k, 0) - a * x) % p
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        return v

    def contains(self, vec: Mapping[int, object]) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Mapping[int, object]) -> bool:
        """Insert a row; returns True if the rank grew."""
        self.seen += 1
        v = self.reduce(vec)
        if not v:
            return False
        c = min(v)
        if self.prime is not None:
            inv = pow(v[c], -1, self.prime)
            v = {k: x * inv % self.prime for k, x in v.items()}
        self.rows[c] = v
        return True

    def extend(self, vecs: Iterable[Mapping[int, object]]) -> int:
        return sum(self.add(v) for v in vecs)

    def rref(self) -> list[dict[int, object]]:
        """Reduced row-echelon basis, sorted by pivot.

        Exact mode yields ``Fraction`` entries with unit pivots; prime mode
        yields residues.
        """
        pivots = sorted(self.rows)
        p = self.prime
        done: dict[int, dict[int, object]] = {}
        for c in reversed(pivots):
            row = self.rows[c]
            if p is None:
                cur = {k: Fraction(x, row[c]) for k, x in row.items()}
            else:
                cur = dict(row)
            for k in [k for k in cur if k != c and k in done]:
                a = cur[k]
                for kk, x in done[k].items():
                    y = cur.get(kk, 0) - a * x
                    if p is not None:
                        y %= p
                    if y:
                        cur[kk] = y
                    else:
                        cur.pop(kk, None)
            done[c] = cur
        return [done[c] for c in pivots]


def rank_of(vecs: Iterable[Mapping[int, object]], prime: int | None = None) -> int:
    space = RowSpace(prime)
    space.extend(vecs)
    return space.rank
