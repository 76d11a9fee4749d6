"""Deterministic matplotlib figures: abacus diagrams and report plots.

Every figure is rendered with a fixed SVG hash salt and no date metadata, so
the same input always produces byte-identical output.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable, Mapping

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from .abacus import HeapConfig, Trace, apply_move  # noqa: E402

SVG_SALT = "klrbound"
ANCHOR_COLOUR = "#d95f02"
BEAD_COLOUR = "#e8eef7"


def _deterministic():
    return matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none",
                                  "font.family": "DejaVu Sans"})


def _save(fig, target: str | Path | None = None, fmt: str = "svg") -> str | None:
    meta = {"Date": None} if fmt in ("svg", "pdf") else None
    with _deterministic():
        if target is None:
            buf = io.StringIO() if fmt == "svg" else io.BytesIO()
            fig.savefig(buf, format=fmt, metadata=meta)
            plt.close(fig)
            return buf.getvalue()
        fig.savefig(target, format=fmt, metadata=meta)
    plt.close(fig)
    return None


def _draw_config(ax, config: HeapConfig, anchor: int | None, antigravity: bool, title: str = ""):
    ax.set_title(title, fontsize=9)
    ax.set_aspect("equal")
    ax.axis("off")
    if not config.beads:
        ax.text(0.5, 0.5, "(empty abacus)", ha="center", va="center", transform=ax.transAxes)
        return
    levels = config.antigravity_levels() if antigravity else config.levels()
    runners = [b.runner for b in config.beads]
    lo, hi = min(runners), max(runners)
    top = max(levels.values())
    for b in config.beads:
        row = levels[b.position]
        y = top - row if antigravity else row - 1
        is_anchor = b.position == anchor
        ax.add_patch(Rectangle((b.runner - 0.45, y + 0.05), 0.9, 0.9,
                               facecolor=ANCHOR_COLOUR if is_anchor else BEAD_COLOUR,
                               edgecolor="black", linewidth=1.2 if is_anchor else 0.8))
        ax.text(b.runner, y + 0.5, str(b.position), ha="center", va="center", fontsize=9)
    base = top + 0.05 if antigravity else 0
    ax.plot([lo - 0.5, hi + 0.5], [base, base], color="black", linewidth=1.5)
    label_y = top + 0.4 if antigravity else -0.4
    for v in range(lo, hi + 1):
        ax.text(v, label_y, str(v), ha="center", va="center", fontsize=8, color="dimgray")
    ax.set_xlim(lo - 0.6, hi + 0.6)
    ax.set_ylim(-0.8, top + 0.8)


def abacus_figure(obj: HeapConfig | Trace):
    """A figure with one panel (configuration) or one panel per trace step."""
    if isinstance(obj, HeapConfig):
        fig, ax = plt.subplots(figsize=(max(2.0, 0.6 * (len(obj.support()) + 1)), 3))
        _draw_config(ax, obj, None, False)
        return fig
    anchor = max((b.position for b in obj.start.beads), default=None)
    panels = [("antigravity", obj.start, anchor)]
    config = obj.start
    for move in obj.moves:
        config, anchor = apply_move(config, anchor, move)
        panels.append((str(move), config, anchor))
    fig, axes = plt.subplots(1, len(panels), figsize=(2.6 * len(panels), 3), squeeze=False)
    for ax, (title, config, anchor) in zip(axes[0], panels):
        _draw_config(ax, config, anchor, True, title)
    fig.tight_layout()
    return fig


def abacus_svg(obj: HeapConfig | Trace) -> str:
    return _save(abacus_figure(obj))


def save_abacus(obj: HeapConfig | Trace, path: str | Path) -> None:
    path = Path(path)
    _save(abacus_figure(obj), path, path.suffix.lstrip(".") or "svg")


def report_figure(checks: Iterable[Mapping], title: str = ""):
    """Scatter of antigravity bound against nilpotency (or level) per check."""
    checks = [c for c in checks if c.get("kind", "theorem") == "theorem"]
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    xs = list(range(len(checks)))
    ax.step(xs, [c["bound"] for c in checks], where="mid", label="antigravity bound", color="black")
    nil = [(x, c["nilpotency"]) for x, c in zip(xs, checks) if c.get("nilpotency") is not None]
    if nil:
        ax.scatter([x for x, _ in nil], [n for _, n in nil], s=12, color=ANCHOR_COLOUR,
                   label="nilpotency degree", zorder=3)
    bad = [x for x, c in zip(xs, checks) if not c["pass"]]
    if bad:
        ax.scatter(bad, [checks[x]["bound"] for x in bad], marker="x", color="red", label="failed")
    ax.set_xlabel("check (sequence, strand)")
    ax.set_ylabel("power of x")
    ax.set_title(title, fontsize=9)
    ax.legend(fontsize=7, loc="upper left")
    fig.tight_layout()
    return fig


def dims_figure(dims: Mapping[int, int], title: str = ""):
    fig, ax = plt.subplots(figsize=(4.5, 3))
    keys = sorted(dims)
    ax.bar(keys, [dims[k] for k in keys], color=BEAD_COLOUR, edgecolor="black")
    ax.set_xlabel("degree")
    ax.set_ylabel("dimension")
    ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return fig


def save_figure(fig, path: str | Path) -> None:
    path = Path(path)
    _save(fig, path, path.suffix.lstrip(".") or "svg")
