"""Render results as an aligned table or as ``key=value`` lines."""

from __future__ import annotations

import shlex
from decimal import Decimal
from fractions import Fraction
from typing import Sequence

from .diagnostics import DiagnosticReport, fmt

FORMATS = ("table", "kv")


def show(value, approx: bool = True) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "pass" if value else "FAIL"
    if isinstance(value, Fraction):
        if value.denominator == 1 or not approx:
            return str(value)
        return f"{value} (~{fmt(value, 10)})"
    if isinstance(value, Decimal):
        return f"{value:.10E}" if value and abs(value) < Decimal("1e-4") else str(value)
    if isinstance(value, tuple):
        return "".join(value) or "λ"
    return str(value)


def _kv_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "none"
    return show(value, approx=False)


def render(title: str, columns: Sequence[str], rows: Sequence[Sequence], fmt_name: str = "table", info: dict | None = None) -> str:
    info = info or {}
    if fmt_name == "kv":
        lines = [f"section={shlex.quote(title)}"]
        lines += [f"{k}={shlex.quote(_kv_value(v))}" for k, v in info.items()]
        for row in rows:
            lines.append(" ".join(f"{c}={shlex.quote(_kv_value(v))}" for c, v in zip(columns, row)))
        return "\n".join(lines) + "\n"
    cells = [[show(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    out = [f"== {title} =="]
    out += [f"{k}: {show(v)}" for k, v in info.items()]
    out.append("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip())
    out.append("  ".join("-" * w for w in widths))
    for r in cells:
        out.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(out) + "\n"


def render_report(report: DiagnosticReport, fmt_name: str = "table") -> str:
    columns = ("check", "statistic", "threshold", "verdict", "formula", "note")
    rows = [(v.check, v.statistic, v.threshold, v.passed, v.formula, v.note) for v in report.verdicts]
    info = {"input": report.provenance, **report.info, "overall": report.passed}
    return render(report.title, columns, rows, fmt_name, info)
