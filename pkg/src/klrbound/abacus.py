"""Bead-and-runner configurations for type A_infinity and antigravity.

A configuration is a heap of pieces: beads are dropped one at a time onto
integer runners, and two beads interact when their runners differ by at most
one.  Bead ``x`` lies below bead ``y`` when there is a time-increasing chain of
interacting beads from ``x`` to ``y``.  Vertical levels are derived from the
placement order and never stored.

Antigravity with anchor ``r`` keeps exactly the principal down-set of bead
``r``; :func:`simulate_antigravity` then applies square, stack and L moves
until one bead per runner remains.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .quiver import A_INFINITY, CartanDatum, Seq, WeightSpec


class NonStandardTableau(ValueError):
    def __init__(self, label: int):
        self.label = label
        super().__init__(f"numbering is not standard: bead labelled {label} is not removable")


@dataclass(frozen=True, order=True)
class Bead:
    position: int
    runner: int


def _interact(a: int, b: int) -> bool:
    return abs(a - b) <= 1


@dataclass(frozen=True)
class HeapConfig:
    """Beads in placement order; positions are the tableau labels."""

    beads: tuple[Bead, ...]

    def __post_init__(self):
        positions = [b.position for b in self.beads]
        if positions != sorted(positions) or len(set(positions)) != len(positions):
            raise ValueError("beads must have distinct positions in increasing order")

    def __len__(self):
        return len(self.beads)

    @property
    def runners(self) -> dict[int, int]:
        return {b.position: b.runner for b in self.beads}

    def runner_of(self, position: int) -> int:
        for b in self.beads:
            if b.position == position:
                return b.runner
        raise KeyError(position)

    def support(self) -> frozenset[int]:
        return frozenset(b.runner for b in self.beads)

    def restrict(self, positions: Iterable[int]) -> "HeapConfig":
        keep = set(positions)
        return HeapConfig(tuple(b for b in self.beads if b.position in keep))

    def up_sets(self) -> dict[int, set[int]]:
        """For every bead, the set of beads strictly above it in heap order."""
        beads = self.beads
        above: dict[int, set[int]] = {}
        for idx in range(len(beads) - 1, -1, -1):
            x = beads[idx]
            acc: set[int] = set()
            for y in beads[idx + 1:]:
                if _interact(x.runner, y.runner) and y.position not in acc:
                    acc.add(y.position)
                    acc |= above[y.position]
            above[x.position] = acc
        return above

    def less(self, x: int, y: int) -> bool:
        return y in self.up_sets()[x]

    def down_set(self, position: int) -> set[int]:
        """Principal down-set of a bead (the bead itself included)."""
        out = {position}
        anchor_runner = self.runner_of(position)
        frontier = [(position, anchor_runner)]
        for b in reversed(self.beads):
            if b.position >= position:
                continue
            if any(_interact(b.runner, r) for p, r in frontier):
                out.add(b.position)
                frontier.append((b.position, b.runner))
        return out

    def levels(self) -> dict[int, int]:
        """Gravity levels (1 = resting on the base)."""
        level: dict[int, int] = {}
        placed: list[Bead] = []
        for b in self.beads:
            below = [level[p.position] for p in placed if _interact(p.runner, b.runner)]
            level[b.position] = 1 + max(below, default=0)
            placed.append(b)
        return level

    def antigravity_levels(self) -> dict[int, int]:
        """Depths measured down from the top (1 = hanging from the ceiling)."""
        depth: dict[int, int] = {}
        placed: list[Bead] = []
        for b in reversed(self.beads):
            above = [depth[p.position] for p in placed if _interact(p.runner, b.runner)]
            depth[b.position] = 1 + max(above, default=0)
            placed.append(b)
        return depth

    def shape(self) -> frozenset[tuple[int, int]]:
        """The unnumbered configuration: (runner, level) cells."""
        lv = self.levels()
        return frozenset((b.runner, lv[b.position]) for b in self.beads)


def _require_a_infinity(datum: CartanDatum) -> None:
    if not datum.is_a_infinity:
        raise ValueError(f"abacus geometry is only defined for A_inf, not {datum.name}")


def conf(seq: Sequence[int], datum: CartanDatum = A_INFINITY) -> HeapConfig:
    _require_a_infinity(datum)
    return HeapConfig(tuple(Bead(k + 1, v) for k, v in enumerate(seq)))


def removable_beads(config: HeapConfig) -> set[Bead]:
    """Maximal beads of the heap order."""
    out = set()
    for idx, b in enumerate(config.beads):
        if not any(_interact(b.runner, c.runner) for c in config.beads[idx + 1:]):
            out.add(b)
    return out


def seq_from_tableau(config: HeapConfig, labels: dict[int, int] | None = None) -> Seq:
    """Read a sequence off a standard numbering of ``config``.

    ``labels`` maps bead positions to tableau labels 1..m; by default the
    placement order is used.  Beads are removed from the largest label down,
    each of which must be removable at that point.
    """
    m = len(config)
    if labels is None:
        labels = {b.position: k + 1 for k, b in enumerate(config.beads)}
    if sorted(labels.values()) != list(range(1, m + 1)) or set(labels) != {b.position for b in config.beads}:
        raise ValueError("labels must be a bijection onto 1..m")
    by_label = {lab: pos for pos, lab in labels.items()}
    runners = config.runners
    lv = config.levels()
    remaining = dict(runners)
    out = [0] * m
    for lab in range(m, 0, -1):
        pos = by_label[lab]
        r = remaining[pos]
        # removable: nothing interacting sits above it
        if any(_interact(r, rr) and lv[p] > lv[pos] for p, rr in remaining.items() if p != pos):
            raise NonStandardTableau(lab)
        out[lab - 1] = r
        del remaining[pos]
    return tuple(out)


def antigravity_survivors(seq: Sequence[int], r: int) -> set[int]:
    if not 1 <= r <= len(seq):
        raise IndexError(f"anchor {r} out of range for length {len(seq)}")
    return conf(seq[:r]).down_set(r)


@dataclass(frozen=True)
class StableSupport:
    low: int | None
    high: int | None

    @property
    def empty(self) -> bool:
        return self.low is None

    def __iter__(self):
        if self.empty:
            return iter(())
        return iter(range(self.low, self.high + 1))

    def __contains__(self, v) -> bool:
        return not self.empty and self.low <= v <= self.high

    def issubset(self, other: "StableSupport") -> bool:
        return self.empty or (not other.empty and other.low <= self.low and self.high <= other.high)

    def to_json(self):
        return None if self.empty else [self.low, self.high]


def stable_support(seq: Sequence[int], r: int) -> StableSupport:
    survivors = antigravity_survivors(seq, r)
    runners = {seq[p - 1] for p in survivors}
    return StableSupport(min(runners), max(runners))


def is_r_stable(seq: Sequence[int], r: int) -> bool:
    survivors = antigravity_survivors(seq, r)
    runners = [seq[p - 1] for p in survivors]
    return len(runners) == len(set(runners))


def antigravity_bound(seq: Sequence[int], r: int, weight: WeightSpec) -> int:
    return sum(weight[j] for j in stable_support(seq, r))


# -- antigravity moves --------------------------------------------------------

@dataclass(frozen=True)
class Move:
    kind: str            # "square" | "stack" | "L"
    destroyed: int
    witnesses: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "destroyed": self.destroyed, "witnesses": list(self.witnesses)}

    def __str__(self):
        if self.kind == "stack":
            return f"stack({self.destroyed} over {self.witnesses[0]})"
        if self.kind == "square":
            return f"square({self.destroyed};{','.join(map(str, self.witnesses))})"
        return f"L({self.destroyed},{self.witnesses[0]};{self.witnesses[1]})"


def available_moves(config: HeapConfig, anchor: int) -> list[Move]:
    """All antigravity moves applicable to a settled configuration."""
    above = config.up_sets()
    runners = config.runners
    by_runner: dict[int, list[int]] = {}
    for b in config.beads:
        by_runner.setdefault(b.runner, []).append(b.position)
    moves = []
    for k, stack in sorted(by_runner.items()):
        for x, y in zip(stack, stack[1:]):
            between = sorted(z for z in above[x]
                             if y in above[z] and runners[z] in (k - 1, k + 1))
            if not between:
                moves.append(Move("stack", y, (x,)))
            elif len(between) == 1:
                moves.append(Move("L", x, (y, between[0])))
            elif len(between) == 2 and y == anchor:
                left, right = sorted(between, key=lambda z: runners[z])
                if runners[left] == k - 1 and runners[right] == k + 1:
                    moves.append(Move("square", x, (left, right, y)))
    return moves


def default_strategy(moves: list[Move]) -> Move:
    squares = [m for m in moves if m.kind == "square"]
    if squares:
        return squares[0]
    ls = [m for m in moves if m.kind == "L"]
    if ls:
        return min(ls, key=lambda m: m.destroyed)
    return min(moves, key=lambda m: m.destroyed)


def reverse_strategy(moves: list[Move]) -> Move:
    """Stack moves first, largest destroyed bead first."""
    order = {"stack": 0, "L": 1, "square": 2}
    return min(moves, key=lambda m: (order[m.kind], -m.destroyed))


def random_strategy(seed: int = 0) -> Callable[[list[Move]], Move]:
    rng = random.Random(seed)

    def pick(moves):
        return rng.choice(moves)

    return pick


STRATEGIES = {"default": default_strategy, "reverse": reverse_strategy}


@dataclass(frozen=True)
class Trace:
    moves: tuple[Move, ...]
    final: HeapConfig
    anchor: int
    start: HeapConfig

    @property
    def support(self) -> StableSupport:
        rs = self.final.support()
        return StableSupport(min(rs), max(rs))

    def to_json(self) -> dict:
        return {"moves": [m.to_json() for m in self.moves], "support": self.support.to_json()}


def _settle(config: HeapConfig, anchor: int) -> HeapConfig:
    return config.restrict(config.down_set(anchor))


def apply_move(config: HeapConfig, anchor: int, move: Move) -> tuple[HeapConfig, int]:
    new_anchor = anchor
    if move.destroyed == anchor:
        # stack with the anchor on top: the bead underneath takes over
        new_anchor = move.witnesses[0]
    rest = config.restrict(p for p in config.runners if p != move.destroyed)
    return _settle(rest, new_anchor), new_anchor


def simulate_antigravity(seq: Sequence[int], r: int,
                         strategy: Callable[[list[Move]], Move] | str = "default") -> Trace:
    if isinstance(strategy, str):
        strategy = STRATEGIES[strategy]
    if not 1 <= r <= len(seq):
        raise IndexError(f"anchor {r} out of range for length {len(seq)}")
    start = _settle(conf(seq), r)
    config, anchor = start, r
    applied = []
    while True:
        moves = available_moves(config, anchor)
        if not moves:
            break
        move = strategy(moves)
        applied.append(move)
        config, anchor = apply_move(config, anchor, move)
    return Trace(tuple(applied), config, anchor, start)


# -- rendering ----------------------------------------------------------------

EMPTY_DIAGRAM = "(empty abacus)"


def render_ascii(config: HeapConfig, anchor: int | None = None, antigravity: bool = False) -> str:
    if not config.beads:
        return EMPTY_DIAGRAM
    runners = [b.runner for b in config.beads]
    lo, hi = min(runners), max(runners)
    width = max(max(len(str(b.position)) for b in config.beads),
                max(len(str(v)) for v in range(lo, hi + 1))) + 2
    if antigravity:
        depth = config.antigravity_levels()
        top = max(depth.values())
        rows = {p: d for p, d in depth.items()}
        order = range(1, top + 1)
    else:
        rows = config.levels()
        order = range(max(rows.values()), 0, -1)
    grid = {(b.runner, rows[b.position]): b.position for b in config.beads}
    lines = []
    for row in order:
        cells = []
        for v in range(lo, hi + 1):
            pos = grid.get((v, row))
            if pos is None:
                cells.append(" " * width)
            elif pos == anchor:
                cells.append(f"<{pos}>".center(width))
            else:
                cells.append(f"[{pos}]".center(width))
        lines.append("".join(cells).rstrip())
    base = "-" * (width * (hi - lo + 1))
    labels = "".join(str(v).center(width) for v in range(lo, hi + 1)).rstrip()
    if antigravity:
        return "\n".join([base] + lines + [labels])
    return "\n".join(lines + [base, labels])


def render(obj: HeapConfig | Trace, fmt: str = "ascii") -> str:
    """Draw a configuration or an antigravity trace as ascii or svg text."""
    if fmt == "svg":
        from .plotting import abacus_svg
        return abacus_svg(obj)
    if fmt != "ascii":
        raise ValueError(f"unknown render format {fmt!r}")
    if isinstance(obj, HeapConfig):
        return render_ascii(obj)
    blocks = ["antigravity:", render_ascii(obj.start, _first_anchor(obj), antigravity=True)]
    config, anchor = obj.start, _first_anchor(obj)
    for move in obj.moves:
        config, anchor = apply_move(config, anchor, move)
        blocks.append(f"{move}:")
        blocks.append(render_ascii(config, anchor, antigravity=True))
    return "\n".join(blocks)


def _first_anchor(trace: Trace) -> int:
    return max(b.position for b in trace.start.beads)
