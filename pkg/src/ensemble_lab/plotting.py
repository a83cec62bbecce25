"""Figures for the report commands, written straight to files.

Uses the object-oriented matplotlib API with the Agg canvas, so nothing
touches pyplot's global state or needs a display.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .diagnostics import DiagnosticReport, chernoff_value

MAX_POINTS = 2000


def _figure(width: float = 6.4, height: float = 4.0):
    fig = Figure(figsize=(width, height))
    FigureCanvasAgg(fig)
    return fig, fig.add_subplot(1, 1, 1)


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)


def _positions(n: int) -> np.ndarray:
    if n <= MAX_POINTS:
        return np.arange(1, n + 1)
    return np.unique(np.geomspace(1, n, MAX_POINTS).astype(np.int64))


def running_frequency(prefix, space, path, eps=None) -> None:
    """Running frequency N_a(n)/n per symbol against P(a), with an eps band."""
    symbols = np.array(prefix.symbols if hasattr(prefix, "symbols") else tuple(prefix), dtype=object)
    n = len(symbols)
    fig, ax = _figure()
    xs = _positions(n)
    for a, w in space.items():
        counts = np.cumsum(symbols == a)
        line = ax.plot(xs, counts[xs - 1] / xs, lw=1, label=f"{a}")[0]
        ax.axhline(float(w), color=line.get_color(), ls="--", lw=0.8)
        if eps is not None:
            e = float(Fraction(eps))
            ax.axhspan(float(w) - e, float(w) + e, color=line.get_color(), alpha=0.1)
    ax.set_xscale("log")
    ax.set_xlabel("prefix length n")
    ax.set_ylabel("N_a / n")
    ax.set_ylim(0, 1)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def level_measures(certs, path) -> None:
    """log2 of each level measure next to the bound -n."""
    idx = sorted(certs)
    fig, ax = _figure()
    ms = [certs[n].measure for n in idx]
    ys = [math.log2(m) if m > 0 else float("nan") for m in ms]
    colors = ["tab:green" if certs[n].certified else "tab:red" for n in idx]
    ax.scatter(idx, ys, c=colors, zorder=3, label="log2 measure")
    ax.plot(idx, [-n for n in idx], "k--", lw=1, label="bound -n")
    for n, m in zip(idx, ms):
        if m == 0:
            ax.annotate("0", (n, -n), textcoords="offset points", xytext=(0, 6), ha="center", fontsize=8)
    ax.set_xlabel("level n")
    ax.set_ylabel("log2 measure")
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def verdict_bars(report: DiagnosticReport, path) -> None:
    """Statistic and threshold per verdict."""
    rows = [v for v in report.verdicts if v.statistic is not None and v.threshold is not None]
    fig, ax = _figure(max(4.0, 1.0 + 0.9 * len(rows)))
    x = np.arange(len(rows))
    stat = [float(v.statistic) for v in rows]
    thr = [float(v.threshold) for v in rows]
    colors = ["tab:green" if v.passed else "tab:red" for v in rows]
    ax.bar(x - 0.2, stat, width=0.4, color=colors, label="statistic")
    ax.bar(x + 0.2, thr, width=0.4, color="0.7", label="threshold")
    ax.set_xticks(x)
    ax.set_xticklabels([v.check for v in rows], rotation=30, ha="right", fontsize=8)
    ax.set_title(report.title)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)


def chernoff_curve(q1: Fraction, eps, n_max: int, path) -> None:
    ns = _positions(n_max)
    vals = [float(chernoff_value(q1, eps, int(k))) for k in ns]
    fig, ax = _figure()
    ax.plot(ns, vals, lw=1)
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("2 exp(-eps^2 n / (2 q0 q1))")
    _save(fig, path)


def code_lengths(space, code, path) -> None:
    """P(a) against 2^-|C(a)| per symbol."""
    symbols = list(space.alphabet)
    x = np.arange(len(symbols))
    fig, ax = _figure(max(4.0, 1.0 + 0.6 * len(symbols)))
    ax.bar(x - 0.2, [float(space[a]) for a in symbols], width=0.4, label="P(a)")
    ax.bar(x + 0.2, [2.0 ** -code.length(a) for a in symbols], width=0.4, label="2^-|C(a)|")
    ax.set_xticks(x)
    ax.set_xticklabels(symbols)
    ax.legend(loc="best", fontsize=8)
    _save(fig, path)
