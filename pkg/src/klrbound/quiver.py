"""Vertices, Cartan pairing, weights, roots and sequences for simply-laced quivers.

Vertices are plain ``int`` values; a sequence is a ``tuple`` of ints.  The
default Cartan datum is the infinite chain A_infinity, where ``i`` and ``j``
are joined by an edge exactly when ``|i - j| == 1``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

DEFAULT_SEQUENCE_CAP = 8

Seq = tuple[int, ...]


class CapExceeded(ValueError):
    """Raised when an enumeration would exceed the configured size cap."""

    def __init__(self, what: str, size: int, cap: int, estimate: int | None = None):
        self.size = size
        self.cap = cap
        self.estimate = estimate
        msg = f"{what}: size {size} exceeds cap {cap}"
        if estimate is not None:
            msg += f" (would enumerate {estimate} items)"
        super().__init__(msg)


@dataclass(frozen=True)
class CartanDatum:
    """A simply-laced Cartan pairing on integer vertices.

    ``edge`` decides whether two distinct vertices are joined by an edge.
    """

    name: str = "A_inf"
    edge: Callable[[int, int], bool] = field(default=lambda i, j: abs(i - j) == 1,
                                             compare=False, repr=False)

    def pair(self, i: int, j: int) -> int:
        if i == j:
            return 2
        return -1 if self.edge(i, j) else 0

    @property
    def is_a_infinity(self) -> bool:
        return self.name == "A_inf"


A_INFINITY = CartanDatum()


def cartan_pair(datum: CartanDatum, i: int, j: int) -> int:
    return datum.pair(i, j)


def _parse_vertex_map(data: Mapping | str) -> dict[int, int]:
    if isinstance(data, str):
        data = json.loads(data)
    out = {}
    for key, val in data.items():
        v = int(key)
        if int(val) != val:
            raise ValueError(f"multiplicity for vertex {key} is not an integer: {val!r}")
        out[v] = int(val)
    return out


@dataclass(frozen=True)
class WeightSpec:
    """A dominant weight: vertex -> nonnegative multiplicity."""

    multiplicities: tuple[tuple[int, int], ...]

    def __init__(self, multiplicities: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(multiplicities)
        for v, n in items.items():
            if n < 0:
                raise ValueError(f"weight multiplicity at vertex {v} is negative")
        clean = tuple(sorted((int(v), int(n)) for v, n in items.items() if n != 0))
        object.__setattr__(self, "multiplicities", clean)

    def __getitem__(self, vertex: int) -> int:
        return dict(self.multiplicities).get(vertex, 0)

    @property
    def level(self) -> int:
        return sum(n for _, n in self.multiplicities)

    def as_dict(self) -> dict[int, int]:
        return dict(self.multiplicities)

    def to_json(self) -> dict[str, int]:
        return {str(v): n for v, n in self.multiplicities}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "WeightSpec":
        return cls(_parse_vertex_map(data))


@dataclass(frozen=True)
class RootSpec:
    """A positive root element nu: vertex -> positive multiplicity."""

    multiplicities: tuple[tuple[int, int], ...]

    def __init__(self, multiplicities: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(multiplicities)
        for v, n in items.items():
            if n < 0:
                raise ValueError(f"root multiplicity at vertex {v} is negative")
        clean = tuple(sorted((int(v), int(n)) for v, n in items.items() if n != 0))
        object.__setattr__(self, "multiplicities", clean)

    def __getitem__(self, vertex: int) -> int:
        return dict(self.multiplicities).get(vertex, 0)

    @property
    def length(self) -> int:
        return sum(n for _, n in self.multiplicities)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.multiplicities)

    def as_dict(self) -> dict[int, int]:
        return dict(self.multiplicities)

    def to_json(self) -> dict[str, int]:
        return {str(v): n for v, n in self.multiplicities}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "RootSpec":
        return cls(_parse_vertex_map(data))

    @classmethod
    def of(cls, seq: Iterable[int]) -> "RootSpec":
        return cls(Counter(seq))

    def count_sequences(self) -> int:
        total = math.factorial(self.length)
        for _, n in self.multiplicities:
            total //= math.factorial(n)
        return total


def seq_to_json(seq: Seq) -> list[int]:
    return list(seq)


def seq_from_json(data) -> Seq:
    if isinstance(data, str):
        data = json.loads(data)
    return tuple(int(v) for v in data)


def _check_cap(nu: RootSpec, cap: int) -> None:
    if nu.length > cap:
        raise CapExceeded("|nu|", nu.length, cap, nu.count_sequences())


def enumerate_sequences(nu: RootSpec, cap: int = DEFAULT_SEQUENCE_CAP) -> list[Seq]:
    """All sequences in Seq(nu) in lexicographic order."""
    _check_cap(nu, cap)
    counts = nu.as_dict()
    letters = sorted(counts)
    m = nu.length
    out: list[Seq] = []
    prefix: list[int] = []

    def rec():
        if len(prefix) == m:
            out.append(tuple(prefix))
            return
        for v in letters:
            if counts[v]:
                counts[v] -= 1
                prefix.append(v)
                rec()
                prefix.pop()
                counts[v] += 1

    rec()
    return out


def swap(seq: Seq, r: int) -> Seq:
    """Apply the transposition s_r (1-indexed) to a sequence."""
    s = list(seq)
    s[r - 1], s[r] = s[r], s[r - 1]
    return tuple(s)


def is_admissible(seq: Seq, r: int, datum: CartanDatum = A_INFINITY) -> bool:
    if not 1 <= r < len(seq):
        raise IndexError(f"transposition position {r} out of range for length {len(seq)}")
    return datum.pair(seq[r - 1], seq[r]) == 0


def weight_graph_components(nu: RootSpec, cap: int = DEFAULT_SEQUENCE_CAP,
                            datum: CartanDatum = A_INFINITY) -> list[list[Seq]]:
    """Connected components of G_nu, each sorted, ordered by smallest member."""
    seqs = enumerate_sequences(nu, cap)
    seen: set[Seq] = set()
    comps = []
    for start in seqs:
        if start in seen:
            continue
        comp = [start]
        seen.add(start)
        stack = [start]
        while stack:
            cur = stack.pop()
            for r in range(1, len(cur)):
                if is_admissible(cur, r, datum):
                    nxt = swap(cur, r)
                    if nxt not in seen:
                        seen.add(nxt)
                        comp.append(nxt)
                        stack.append(nxt)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: c[0])
    return comps
