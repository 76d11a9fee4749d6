"""``klrbound`` command-line interface.

Positions (anchors, strands, bead labels) are 1-indexed.  Vertex maps are
JSON objects with decimal-string keys, e.g. ``'{"-1":1,"0":2}'``.  A
sequence that starts with a negative vertex must be attached with ``=``:
``--seq=-1,0,2``.

Exit status: 0 on success, 1 when a verification check fails, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import abacus, cyclotomic
from .algebra import Element
from .expr import IdempotentMismatch, ParseError, parse_expression
from .linalg import parse_field
from .quiver import CapExceeded, RootSpec, WeightSpec, weight_graph_components

log = logging.getLogger("klrbound")


class UsageError(Exception):
    pass


# -- argument parsing -----------------------------------------------------------

def _seq(text: str) -> tuple[int, ...]:
    try:
        seq = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    if not seq:
        raise argparse.ArgumentTypeError("empty sequence")
    return seq


def _vertex_map(cls):
    def parse(text: str):
        try:
            return cls.from_json(text)
        except (ValueError, TypeError, AttributeError) as exc:
            raise argparse.ArgumentTypeError(f"bad vertex map {text!r}: {exc}")
    parse.__name__ = cls.__name__
    return parse


def _field(text: str):
    try:
        return parse_field(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text", "svg"], default="text")
    common.add_argument("--output", "-o", help="write the result to this file instead of stdout")
    common.add_argument("--field", type=_field, default=None, metavar="exact|prime:P",
                        help="linear algebra field (default exact)")
    common.add_argument("--cache-dir", default=None,
                        help="directory for reduced ideal pieces (fallback: $KLR_CACHE_DIR)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: available CPUs)")
    common.add_argument("--plot", default=None, metavar="PATH",
                        help="also write a matplotlib figure to PATH (svg/png/pdf)")
    common.add_argument("--timing", action="store_true", help="include wall time in reports")
    common.add_argument("--nu-cap", type=int, default=cyclotomic.DESK_NU_CAP)
    common.add_argument("--level-cap", type=int, default=cyclotomic.DESK_LEVEL_CAP)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="klrbound", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    def seq_anchor(p, anchor_required=True):
        p.add_argument("--seq", type=_seq, required=True, help="comma-separated vertices")
        p.add_argument("--anchor", "-r", type=int, required=anchor_required,
                       help="1-indexed anchor position")

    p = verb("bound", "stable support and antigravity bound b_r")
    seq_anchor(p)
    p.add_argument("--weight", type=_vertex_map(WeightSpec), default=WeightSpec())

    p = verb("stable", "antigravity survivors and whether the sequence is r-stable")
    seq_anchor(p)

    p = verb("trace", "antigravity moves down to the stable configuration")
    seq_anchor(p)
    p.add_argument("--strategy", default="default",
                   help="default | reverse | random:SEED")

    p = verb("render", "draw the abacus of a sequence (with --anchor: the antigravity trace)")
    seq_anchor(p, anchor_required=False)

    p = verb("reduce", "normal form of an expression")
    p.add_argument("expr")
    p.add_argument("--allow-mismatch", action="store_true",
                   help="treat idempotent mismatches as zero instead of an error")

    p = verb("mult", "product A*B of two expressions (A on top)")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--allow-mismatch", action="store_true")

    p = verb("components", "connected components of the weight graph of nu")
    p.add_argument("--nu", type=_vertex_map(RootSpec), required=True)

    def nu_weight(p):
        p.add_argument("--nu", type=_vertex_map(RootSpec), required=True)
        p.add_argument("--weight", type=_vertex_map(WeightSpec), required=True)

    p = verb("verify", "check x_r^{b_r} = 0, x_r^level = 0 and the stable case in the quotient")
    nu_weight(p)
    p.add_argument("--seq", type=_seq, help="restrict to one sequence")
    p.add_argument("--anchor", "-r", type=int, help="restrict to one strand")
    p.add_argument("--nilpotency", action="store_true",
                   help="also compute the exact nilpotency degree of every check")

    p = verb("nilpotency", "smallest n with x_r^n = 0 in the quotient")
    seq_anchor(p)
    p.add_argument("--weight", type=_vertex_map(WeightSpec), required=True)
    p.add_argument("--nu", type=_vertex_map(RootSpec), default=None,
                   help="defaults to the content of --seq")

    p = verb("dims", "graded dimensions of the cyclotomic quotient")
    nu_weight(p)

    p = verb("tightness", "pairs (i, r) whose nilpotency degree is below b_r")
    nu_weight(p)
    return parser


# -- verbs ------------------------------------------------------------------------

def _context(args, nu: RootSpec) -> cyclotomic.QuotientContext:
    cache = args.cache_dir or os.environ.get("KLR_CACHE_DIR") or None
    return cyclotomic.QuotientContext(nu, args.weight, args.field, nu_cap=args.nu_cap,
                                      level_cap=args.level_cap, cache_dir=cache)


def _check_anchor(seq, r):
    if r is not None and not 1 <= r <= len(seq):
        raise UsageError(f"anchor {r} out of range for a sequence of length {len(seq)}")


def _parse(text: str, allow: bool) -> Element:
    return parse_expression(text, allow_mismatch=allow)


def _element_result(el: Element) -> tuple[object, str]:
    return {"normal_form": str(el), "terms": el.to_json()}, str(el)


def run_bound(args):
    _check_anchor(args.seq, args.anchor)
    sup = abacus.stable_support(args.seq, args.anchor)
    b = abacus.antigravity_bound(args.seq, args.anchor, args.weight)
    data = {"seq": list(args.seq), "anchor": args.anchor, "support": sup.to_json(), "bound": b}
    return data, f"support {sup.to_json()}  b_{args.anchor} = {b}", 0


def run_stable(args):
    _check_anchor(args.seq, args.anchor)
    surv = sorted(abacus.antigravity_survivors(args.seq, args.anchor))
    stable = abacus.is_r_stable(args.seq, args.anchor)
    removed = sorted(set(range(1, args.anchor + 1)) - set(surv))
    data = {"seq": list(args.seq), "anchor": args.anchor, "survivors": surv,
            "removed": removed, "stable": stable,
            "support": abacus.stable_support(args.seq, args.anchor).to_json()}
    text = (f"survivors {surv}\nremoved {removed}\n"
            f"{'r-stable' if stable else 'not r-stable'}")
    return data, text, 0


def _strategy(name: str):
    if name.startswith("random:"):
        return abacus.random_strategy(int(name.split(":", 1)[1]))
    if name not in abacus.STRATEGIES:
        raise UsageError(f"unknown strategy {name!r}")
    return abacus.STRATEGIES[name]


def run_trace(args):
    _check_anchor(args.seq, args.anchor)
    trace = abacus.simulate_antigravity(args.seq, args.anchor, _strategy(args.strategy))
    if args.plot:
        from .plotting import save_abacus
        save_abacus(trace, args.plot)
    if args.format == "svg":
        return None, abacus.render(trace, "svg"), 0
    text = "\n".join(str(m) for m in trace.moves) or "(no moves)"
    text += f"\nsupport {trace.support.to_json()}\n" + abacus.render(trace)
    return trace.to_json(), text, 0


def run_render(args):
    _check_anchor(args.seq, args.anchor)
    obj = (abacus.simulate_antigravity(args.seq, args.anchor) if args.anchor
           else abacus.conf(args.seq))
    if args.plot:
        from .plotting import save_abacus
        save_abacus(obj, args.plot)
    if args.format == "svg":
        return None, abacus.render(obj, "svg"), 0
    text = abacus.render(obj, "ascii")
    return {"seq": list(args.seq), "anchor": args.anchor, "diagram": text}, text, 0


def run_reduce(args):
    data, text = _element_result(_parse(args.expr, args.allow_mismatch))
    return data, text, 0


def run_mult(args):
    a = _parse(args.left, args.allow_mismatch)
    b = _parse(args.right, args.allow_mismatch)
    data, text = _element_result(a * b)
    return data, text, 0


def run_components(args):
    comps = weight_graph_components(args.nu, cap=max(args.nu_cap, args.nu.length))
    data = {"nu": args.nu.to_json(), "components": [[list(s) for s in c] for c in comps]}
    text = "\n".join(" ".join(",".join(map(str, s)) for s in c) for c in comps)
    return data, text, 0


def run_verify(args):
    ctx = _context(args, args.nu)
    scope = None
    if args.seq is not None:
        if RootSpec.of(args.seq) != args.nu:
            raise UsageError("--seq is not a sequence of --nu")
        _check_anchor(args.seq, args.anchor)
        strands = [args.anchor] if args.anchor else range(1, len(args.seq) + 1)
        scope = [(args.seq, r) for r in strands]
    elif args.anchor is not None:
        raise UsageError("--anchor needs --seq")
    workers = args.workers or os.cpu_count() or 1
    report = cyclotomic.verify_parallel(ctx, workers, args.nilpotency, scope)
    data = report.to_json(timing=args.timing)
    if args.plot:
        from .plotting import report_figure, save_figure
        save_figure(report_figure(data["checks"], f"nu={args.nu.to_json()} lambda={args.weight.to_json()}"),
                    args.plot)
    lines = []
    for c in report.checks:
        extra = "" if c.nilpotency is None else f" nilpotency={c.nilpotency}"
        lines.append(f"{'PASS' if c.passed else 'FAIL'} {c.kind:9s} seq={','.join(map(str, c.seq))} "
                     f"r={c.r} bound={c.bound}{extra}")
    lines.append(f"{len(report.checks) - len(report.failures)}/{len(report.checks)} checks passed")
    if args.timing:
        lines.append(f"time {report.timing_ms:.1f} ms")
    return data, "\n".join(lines), 0 if report.passed else 1


def run_nilpotency(args):
    _check_anchor(args.seq, args.anchor)
    nu = args.nu or RootSpec.of(args.seq)
    if RootSpec.of(args.seq) != nu:
        raise UsageError("--seq is not a sequence of --nu")
    ctx = _context(args, nu)
    n = ctx.nilpotency_degree(args.seq, args.anchor)
    b = abacus.antigravity_bound(args.seq, args.anchor, args.weight)
    data = {"seq": list(args.seq), "r": args.anchor, "nilpotency": n, "bound": b,
            "level": args.weight.level}
    return data, f"nilpotency {n} (bound {b}, level {args.weight.level})", 0


def run_dims(args):
    ctx = _context(args, args.nu)
    start = time.perf_counter()
    dims = ctx.graded_dimensions()
    total = sum(dims.values())
    data = {"nu": args.nu.to_json(), "lambda": args.weight.to_json(),
            "graded": {str(d): n for d, n in sorted(dims.items())}, "total": total,
            "timing_ms": round((time.perf_counter() - start) * 1000, 3) if args.timing else None}
    if args.plot:
        from .plotting import dims_figure, save_figure
        save_figure(dims_figure(dims, f"nu={args.nu.to_json()} lambda={args.weight.to_json()}"),
                    args.plot)
    text = "\n".join(f"degree {d}: {n}" for d, n in sorted(dims.items()))
    return data, (text + "\n" if text else "") + f"total {total}", 0


def run_tightness(args):
    ctx = _context(args, args.nu)
    rows = ctx.tightness_report()
    data = {"nu": args.nu.to_json(), "lambda": args.weight.to_json(),
            "gaps": [{"seq": list(s), "r": r, "bound": b, "nilpotency": n} for s, r, b, n in rows]}
    text = "\n".join(f"seq={','.join(map(str, s))} r={r} bound={b} nilpotency={n}"
                     for s, r, b, n in rows) or "no gaps: every bound is attained"
    return data, text, 0


VERBS = {"bound": run_bound, "stable": run_stable, "trace": run_trace, "render": run_render,
         "reduce": run_reduce, "mult": run_mult, "components": run_components,
         "verify": run_verify, "nilpotency": run_nilpotency, "dims": run_dims,
         "tightness": run_tightness}


def run(argv: list[str] | None = None) -> tuple[int, str, str | None]:
    """Execute one command; returns (exit status, serialized output, output path)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.format == "svg" and args.verb not in ("render", "trace"):
        raise UsageError("--format svg is only valid for render and trace")
    data, text, status = VERBS[args.verb](args)
    if args.format == "json":
        out = json.dumps(data, sort_keys=True, indent=2)
    else:
        out = text
    return status, out, args.output


def main(argv: list[str] | None = None) -> int:
    try:
        status, out, target = run(argv)
    except (UsageError, ParseError, IdempotentMismatch, CapExceeded, IndexError, ValueError) as exc:
        print(f"klrbound: error: {exc}", file=sys.stderr)
        return 2
    if target:
        Path(target).write_text(out if out.endswith("\n") else out + "\n")
    else:
        print(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
