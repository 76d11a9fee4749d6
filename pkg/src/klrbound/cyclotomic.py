"""Cyclotomic quotients R(nu)/J_Lambda: exact ideal membership and nilpotency.

The two-sided ideal ``J_Lambda`` is generated by ``g_j = x_1^{lambda_{j_1}} 1_j``
over ``j`` in Seq(nu).  Because dots commute with ``g_j`` and the normal form
keeps dots at the bottom, the graded piece ``1_top J 1_bottom`` of degree
``d`` is spanned by

    psi_u g_j psi_w x^b 1_bottom

with ``u: j -> top``, ``w: bottom -> j`` ranging over all permutations and
``x^b`` any dot monomial of the right degree.  Right multiplication by
``x^b`` only shifts exponents, so each product ``psi_u g_j psi_w`` is
computed once.

Pieces are filled lazily: a membership query pulls spanning rows until the
query reduces to zero or the rows run out.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Sequence

from . import abacus
from .algebra import (DEFAULT_ALGEBRA, Element, KLRAlgebra, Monomial, canonical_word,
                      compositions, crossing_degree, dot, graded_monomials, inversions,
                      perms_between)
from .linalg import RowSpace, _integerize
from .quiver import CapExceeded, RootSpec, Seq, WeightSpec, enumerate_sequences

log = logging.getLogger(__name__)

CACHE_SCHEMA_VERSION = 1
DESK_NU_CAP = 5
DESK_LEVEL_CAP = 3


def min_monomial_degree(m: int) -> int:
    """Every crossing has degree >= -2, and a reduced word has at most m(m-1)/2."""
    return -2 * (m * (m - 1) // 2)


class _Piece:
    """One graded block ``1_top J 1_bottom`` in degree ``d``."""

    def __init__(self, columns: list[Monomial], rows: Iterator[dict], prime: int | None):
        self.columns = columns
        self.index = {m: k for k, m in enumerate(columns)}
        self.space = RowSpace(prime)
        self._rows = rows
        self.complete = not columns

    @property
    def dim(self) -> int:
        return len(self.columns)

    def vector(self, terms: dict) -> dict[int, Fraction]:
        # monomials outside the column set (only in truncated pieces) are dropped
        index = self.index
        return {index[m]: c for m, c in terms.items() if m in index}

    def _pull(self) -> bool:
        if self.complete:
            return False
        for terms in self._rows:
            if self.space.add(self.vector(terms)):
                if self.space.rank == self.dim:
                    self.complete = True
                return True
        self.complete = True
        return False

    def contains(self, terms: dict) -> bool:
        vec = self.vector(terms)
        if not vec:
            return True
        while True:
            if self.space.contains(vec):
                return True
            if not self._pull():
                return False

    def fill(self) -> int:
        while self._pull():
            pass
        return self.space.rank


@dataclass
class Check:
    kind: str            # "theorem" | "corollary" | "lemma"
    seq: Seq
    r: int
    bound: int
    passed: bool
    nilpotency: int | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "seq": list(self.seq), "r": self.r, "bound": self.bound,
                "nilpotency": self.nilpotency, "pass": self.passed}


@dataclass
class Report:
    nu: RootSpec
    weight: WeightSpec
    checks: list[Check] = field(default_factory=list)
    timing_ms: float | None = None
    matrix_sizes: dict | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self, timing: bool = False) -> dict:
        return {"nu": self.nu.to_json(), "lambda": self.weight.to_json(),
                "checks": [c.to_json() for c in self.checks],
                "timing_ms": round(self.timing_ms, 3) if timing and self.timing_ms is not None else None}


class QuotientContext:
    """(nu, Lambda) together with lazily row-reduced pieces of J_Lambda."""

    def __init__(self, nu: RootSpec, weight: WeightSpec, prime: int | None = None,
                 nu_cap: int = DESK_NU_CAP, level_cap: int = DESK_LEVEL_CAP,
                 cache_dir: str | os.PathLike | None = None,
                 algebra: KLRAlgebra = DEFAULT_ALGEBRA):
        if nu.length > nu_cap:
            raise CapExceeded("|nu|", nu.length, nu_cap, nu.count_sequences())
        if weight.level > level_cap:
            raise CapExceeded("level", weight.level, level_cap)
        self.nu = nu
        self.weight = weight
        self.prime = prime
        self.m = nu.length
        self.algebra = algebra
        self.sequences = enumerate_sequences(nu, cap=nu_cap)
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._pieces: dict[tuple, _Piece] = {}
        self._truncated: dict[tuple, _Piece] = {}
        self._level_certified = False
        self._products: dict[tuple, tuple] = {}
        self._lock = threading.RLock()

    # spanning set ---------------------------------------------------------

    def _generator(self, j: Seq) -> Monomial:
        e = [0] * self.m
        e[0] = self.weight[j[0]]
        return Monomial(j, tuple(e), ())

    def _core_products(self, bottom: Seq, top: Seq) -> list[tuple[int, tuple]]:
        """All ``(degree, psi_u g_j psi_w 1_bottom)`` for this block."""
        key = (bottom, top)
        hit = self._products.get(key)
        if hit is not None:
            return hit
        out = []
        zero = (0,) * self.m
        for j in self.sequences:
            g = self._generator(j)
            gdeg = 2 * g.exps[0]
            for w in perms_between(bottom, j):
                q = Monomial(bottom, zero, canonical_word(w))
                qdeg = crossing_degree(bottom, w, self.algebra.datum)
                gq = self.algebra.mul_monomials(g, q)
                for u in perms_between(j, top):
                    udeg = crossing_degree(j, u, self.algebra.datum)
                    p = Monomial(j, zero, canonical_word(u))
                    acc: dict = {}
                    for mono, c in gq:
                        for m2, c2 in self.algebra.mul_monomials(p, mono):
                            v = acc.get(m2, 0) + c * c2
                            if v:
                                acc[m2] = v
                            else:
                                acc.pop(m2, None)
                    if acc:
                        length = inversions(u) + inversions(w)
                        out.append((udeg + gdeg + qdeg, length, tuple(acc.items())))
        out.sort(key=lambda t: t[1])
        out = [(deg, terms) for deg, _, terms in out]
        self._products[key] = out
        return out

    def _rows(self, bottom: Seq, top: Seq, d: int, max_dot: int | None = None) -> Iterator[dict]:
        products = self._core_products(bottom, top)
        # cheap shifts first: small dot insertions, then longer words
        by_shift: dict[int, list] = {}
        for deg, terms in products:
            rem = d - deg
            if rem >= 0 and rem % 2 == 0:
                by_shift.setdefault(rem // 2, []).append(terms)
        for shift in sorted(by_shift):
            for b in compositions(shift, self.m):
                if max_dot is not None and max(b, default=0) > max_dot:
                    continue
                for terms in by_shift[shift]:
                    yield {Monomial(mo.seq, tuple(x + y for x, y in zip(mo.exps, b)), mo.word): c
                           for mo, c in terms}

    def piece(self, bottom: Seq, top: Seq, d: int) -> _Piece:
        key = (tuple(bottom), tuple(top), d)
        with self._lock:
            pc = self._pieces.get(key)
            if pc is None:
                columns = graded_monomials(self.nu, key[0], key[1], d, cap=self.m,
                                           datum=self.algebra.datum)
                pc = _Piece(columns, self._rows(*key), self.prime)
                self._load_cached(key, pc)
                self._pieces[key] = pc
            return pc

    def truncated_piece(self, bottom: Seq, top: Seq, d: int) -> _Piece:
        """The block restricted to monomials whose dot exponents are all < level.

        Once every ``x_r^level 1_i`` is known to lie in J (see
        :meth:`certify_level_bound`), every monomial with a larger exponent
        lies in J, so J splits as (those monomials) + (its projection onto the
        remaining columns).  The quotient block therefore has dimension
        ``len(columns) - rank``, and only rows ``x^b`` with ``b_k < level`` can
        project to something nonzero.
        """
        key = (tuple(bottom), tuple(top), d)
        with self._lock:
            pc = self._truncated.get(key)
            if pc is None:
                level = self.weight.level
                columns = [mo for mo in graded_monomials(self.nu, key[0], key[1], d, cap=self.m,
                                                         datum=self.algebra.datum)
                           if max(mo.exps, default=0) < level]
                pc = _Piece(columns, self._rows(*key, max_dot=level - 1), self.prime)
                self._load_cached(key + ("truncated",), pc)
                self._truncated[key] = pc
            return pc

    def ideal_spanning_set(self, bottom: Seq, top: Seq, d: int) -> list[Element]:
        """Every nonzero product ``p g_j q`` of degree ``d`` in the block.

        ``p`` and ``q`` run over all normal-form monomials, with degrees
        enumerated down to :func:`min_monomial_degree`.  Membership tests
        use the smaller set of :meth:`reduced_spanning_set`, which has the
        same span.
        """
        bottom, top = tuple(bottom), tuple(top)
        lo = min_monomial_degree(self.m)
        datum = self.algebra.datum
        out = []
        for j in self.sequences:
            g = self._generator(j)
            gdeg = 2 * g.exps[0]
            for dq in range(lo, d - gdeg - lo + 1):
                qs = graded_monomials(self.nu, bottom, j, dq, cap=self.m, datum=datum)
                ps = graded_monomials(self.nu, j, top, d - gdeg - dq, cap=self.m, datum=datum)
                if not qs or not ps:
                    continue
                for q in qs:
                    gq = Element(dict(self.algebra.mul_monomials(g, q)))
                    for p in ps:
                        prod = Element.monomial(p) * gq
                        if not prod.is_zero():
                            out.append(prod)
        return out

    def reduced_spanning_set(self, bottom: Seq, top: Seq, d: int) -> list[Element]:
        """``psi_u g_j psi_w x^b``: the same span as :meth:`ideal_spanning_set`."""
        return [Element(t) for t in self._rows(tuple(bottom), tuple(top), d)]

    # membership -----------------------------------------------------------

    def _check_nu(self, element: Element) -> None:
        root = element.root
        if root is not None and root != self.nu:
            raise ValueError(f"element lives in nu={root.to_json()}, context has {self.nu.to_json()}")

    def idempotent_vanishes(self, seq: Seq) -> bool:
        seq = tuple(seq)
        with self._lock:
            pc = self.piece(seq, seq, 0)
            return pc.contains({Monomial(seq, (0,) * self.m, ()): 1})

    def is_zero_in_quotient(self, element: Element) -> bool:
        self._check_nu(element)
        for (bottom, top, d), part in element.components(self.algebra.datum).items():
            if self.idempotent_vanishes(bottom) or self.idempotent_vanishes(top):
                continue
            with self._lock:
                if not self.piece(bottom, top, d).contains(part.terms):
                    return False
        return True

    def dot_power_vanishes(self, seq: Seq, r: int, n: int) -> bool:
        seq = tuple(seq)
        if n == 0:
            return self.idempotent_vanishes(seq)
        return self.is_zero_in_quotient(dot(r, seq, n))

    def nilpotency_degree(self, seq: Seq, r: int) -> int:
        """Smallest n with x_{r,seq}^n = 0 (0 when 1_seq itself vanishes)."""
        seq = tuple(seq)
        if not 1 <= r <= len(seq):
            raise IndexError(f"strand {r} out of range")
        for n in range(self.weight.level + 1):
            if self.dot_power_vanishes(seq, r, n):
                return n
        raise ArithmeticError(
            f"x_{r}^{self.weight.level} is nonzero on {seq}: level bound violated")

    # verification ---------------------------------------------------------

    def verify_theorem(self, scope: Sequence[tuple[Seq, int]] | None = None,
                       nilpotency: bool = False) -> Report:
        """Check x_r^{b_r} = 0, x_r^level = 0 and the stable-sequence case."""
        start = time.perf_counter()
        report = Report(self.nu, self.weight)
        level = self.weight.level
        if scope is None:
            scope = [(i, r) for i in self.sequences for r in range(1, self.m + 1)]
        for seq, r in scope:
            seq = tuple(seq)
            bound = abacus.antigravity_bound(seq, r, self.weight)
            nil = self.nilpotency_degree(seq, r) if nilpotency else None
            ok = self.dot_power_vanishes(seq, r, bound)
            report.checks.append(Check("theorem", seq, r, bound, ok, nil))
            if abacus.is_r_stable(seq, r):
                report.checks.append(Check("lemma", seq, r, bound, ok, nil))
            report.checks.append(Check("corollary", seq, r, level,
                                       self.dot_power_vanishes(seq, r, level), nil))
        report.timing_ms = (time.perf_counter() - start) * 1000
        report.matrix_sizes = self.matrix_sizes()
        log.info("verified nu=%s lambda=%s in %.1f ms", self.nu.to_json(),
                 self.weight.to_json(), report.timing_ms)
        return report

    def tightness_report(self) -> list[tuple[Seq, int, int, int]]:
        out = []
        for seq in self.sequences:
            if self.idempotent_vanishes(seq):
                continue
            for r in range(1, self.m + 1):
                bound = abacus.antigravity_bound(seq, r, self.weight)
                actual = self.nilpotency_degree(seq, r)
                if actual < bound:
                    out.append((seq, r, bound, actual))
        return out

    def check_anchor_prop(self) -> list[tuple[Seq, int]]:
        """Violations of: i_{m-1} = i_m and x_{m-1}^b = 0 imply x_m^b = 0."""
        m = self.m
        violations = []
        if m < 2:
            return violations
        for seq in self.sequences:
            if seq[m - 2] != seq[m - 1]:
                continue
            for b in range(self.weight.level + 1):
                if self.dot_power_vanishes(seq, m - 1, b) and not self.dot_power_vanishes(seq, m, b):
                    violations.append((seq, b))
        return violations

    # dimensions -----------------------------------------------------------

    def degree_range(self) -> range:
        m, level = self.m, self.weight.level
        if level == 0:
            return range(0, 0)
        hi = m * (m - 1) // 2 + 2 * m * (level - 1)
        return range(min_monomial_degree(m), hi + 1)

    def certify_level_bound(self) -> None:
        """Check ``x_r^level 1_i = 0`` for every surviving i and r, by exact membership."""
        if self._level_certified:
            return
        level = self.weight.level
        for seq in self.sequences:
            if self.idempotent_vanishes(seq):
                continue
            for r in range(1, self.m + 1):
                if not self.dot_power_vanishes(seq, r, level):
                    raise ArithmeticError(
                        f"x_{r}^{level} is nonzero on {seq}: level bound violated")
        self._level_certified = True

    def graded_dimension(self, d: int) -> int:
        self.certify_level_bound()
        total = 0
        for bottom in self.sequences:
            if self.idempotent_vanishes(bottom):
                continue
            for top in self.sequences:
                if self.idempotent_vanishes(top):
                    continue
                with self._lock:
                    pc = self.truncated_piece(bottom, top, d)
                    total += pc.dim - pc.fill()
                    self._store_cached((bottom, top, d, "truncated"), pc)
        return total

    def graded_dimensions(self) -> dict[int, int]:
        dims = {d: self.graded_dimension(d) for d in self.degree_range()}
        return {d: n for d, n in dims.items() if n}

    def total_dimension(self) -> int:
        return sum(self.graded_dimensions().values())

    def matrix_sizes(self) -> dict[str, list[int]]:
        return {f"{list(b)}|{list(t)}|{d}": [pc.space.seen, pc.dim, pc.space.rank]
                for (b, t, d), pc in sorted(self._pieces.items())}

    # disk cache -----------------------------------------------------------

    def _cache_key(self, key: tuple) -> dict:
        bottom, top, d, *mode = key
        return {"schema": CACHE_SCHEMA_VERSION, "nu": self.nu.to_json(),
                "lambda": self.weight.to_json(), "bottom": list(bottom), "top": list(top),
                "d": d, "field": "exact" if self.prime is None else f"prime:{self.prime}",
                "columns_kind": mode[0] if mode else "full"}

    def _cache_path(self, key: tuple) -> Path | None:
        if self.cache_dir is None:
            return None
        blob = json.dumps(self._cache_key(key), sort_keys=True, separators=(",", ":"))
        return self.cache_dir / (hashlib.sha256(blob.encode()).hexdigest()[:32] + ".json")

    def _store_cached(self, key: tuple, pc: _Piece) -> None:
        path = self._cache_path(key)
        if path is None or not pc.complete or path.exists():
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        doc = self._cache_key(key)
        doc["columns"] = [[list(m.seq), list(m.exps), list(m.word)] for m in pc.columns]
        doc["rref"] = [{str(k): str(v) for k, v in sorted(row.items())} for row in pc.space.rref()]
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc, sort_keys=True, separators=(",", ":")))
        tmp.replace(path)

    def _load_cached(self, key: tuple, pc: _Piece) -> None:
        path = self._cache_path(key)
        if path is None or not path.exists():
            return
        try:
            doc = json.loads(path.read_text())
        except (OSError, ValueError):
            return
        expect = self._cache_key(key)
        if any(doc.get(k) != v for k, v in expect.items()):
            log.info("cache entry %s is stale, regenerating", path.name)
            return
        columns = [Monomial(tuple(s), tuple(e), tuple(w)) for s, e, w in doc["columns"]]
        if columns != pc.columns:
            return
        for row in doc["rref"]:
            vec = {int(k): Fraction(v) for k, v in row.items()}
            if self.prime is None:
                vec = _integerize(vec)
            pc.space.add(vec)
        pc.complete = True


# -- grid drivers ---------------------------------------------------------------

def _verify_one(args) -> dict:
    nu_json, weight_json, prime, nilpotency, scope = args
    ctx = QuotientContext(RootSpec.from_json(nu_json), WeightSpec.from_json(weight_json), prime,
                          nu_cap=99, level_cap=99)
    return ctx.verify_theorem(scope, nilpotency=nilpotency).to_json(timing=True)


def verify_grid(pairs: Sequence[tuple[RootSpec, WeightSpec]], prime: int | None = None,
                workers: int = 1, nilpotency: bool = False) -> list[dict]:
    """Verify many (nu, Lambda) pairs; results come back in input order."""
    jobs = [(nu.to_json(), w.to_json(), prime, nilpotency, None) for nu, w in pairs]
    if workers <= 1:
        return [_verify_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_verify_one, jobs, chunksize=4))


def verify_parallel(ctx: QuotientContext, workers: int, nilpotency: bool = False,
                    scope: Sequence[tuple[Seq, int]] | None = None) -> Report:
    """Split one verification across processes, one chunk per sequence.

    Checks are merged back in the serial order, so the report does not
    depend on the worker count.
    """
    if scope is None:
        scope = [(i, r) for i in ctx.sequences for r in range(1, ctx.m + 1)]
    if workers <= 1 or len(scope) <= 1:
        return ctx.verify_theorem(scope, nilpotency=nilpotency)
    start = time.perf_counter()
    chunks: dict[Seq, list] = {}
    for seq, r in scope:
        chunks.setdefault(tuple(seq), []).append((tuple(seq), r))
    jobs = [(ctx.nu.to_json(), ctx.weight.to_json(), ctx.prime, nilpotency, chunk)
            for chunk in chunks.values()]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_verify_one, jobs))
    report = Report(ctx.nu, ctx.weight)
    for part in parts:
        for c in part["checks"]:
            report.checks.append(Check(c["kind"], tuple(c["seq"]), c["r"], c["bound"],
                                       c["pass"], c["nilpotency"]))
    report.timing_ms = (time.perf_counter() - start) * 1000
    return report


def desk_grid(window: Sequence[int], max_nu: int, max_level: int) -> list[tuple[RootSpec, WeightSpec]]:
    """All (nu, Lambda) with |nu| <= max_nu and level <= max_level on ``window``."""
    def multisets(size):
        if size == 0:
            yield {}
            return
        for combo in compositions(size, len(window)):
            yield {v: n for v, n in zip(window, combo) if n}

    nus = [RootSpec(ms) for n in range(1, max_nu + 1) for ms in multisets(n)]
    weights = [WeightSpec(ms) for n in range(0, max_level + 1) for ms in multisets(n)]
    return [(nu, w) for nu in nus for w in weights]
