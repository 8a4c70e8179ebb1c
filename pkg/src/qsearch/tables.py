"""Builders for the result tables and the depth-figure data, plus renderers.

Probabilities print with 3 decimals and expected depths with 2 (matching the
source tables); JSON output carries full precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .costs import DepthParams, GateDepthTable
from .critical import critical_alpha
from .optimize import OptResult, _plan_numbers, optimize_grover, optimize_one_stage, optimize_two_stage


@dataclass(frozen=True)
class Table:
    name: str
    title: str
    columns: tuple[str, ...]
    formats: tuple[str, ...]  # printf-style, per column
    rows: list[tuple]

    def formatted_rows(self) -> list[list[str]]:
        out = []
        for row in self.rows:
            out.append([
                (fmt % value) if value is not None else "NA"
                for fmt, value in zip(self.formats, row)
            ])
        return out


def _params(n: int, alpha, table: GateDepthTable | None) -> DepthParams:
    return DepthParams.make(n, alpha, table)


def build_grover_table(n_range, alpha=1, table: GateDepthTable | None = None) -> Table:
    rows = []
    for n in n_range:
        r = optimize_grover(n, _params(n, alpha, table))
        rows.append((n, str(r.sequence), r.probability, r.single_run_depth, r.expected_depth))
    return Table(
        name="grover",
        title=f"Grover MED (alpha={alpha})",
        columns=("n", "sequence", "success_probability", "single_run_depth", "expected_depth"),
        formats=("%d", "%s", "%.3f", "%.0f", "%.2f"),
        rows=rows,
    )


def build_one_stage_table(n_range, alpha=1, table: GateDepthTable | None = None) -> Table:
    rows = []
    for n in n_range:
        r = optimize_one_stage(n, _params(n, alpha, table))
        rows.append((n, str(r.sequence), r.probability, r.single_run_depth, r.expected_depth))
    return Table(
        name="one_stage",
        title=f"One-stage MED (alpha={alpha})",
        columns=("n", "sequence", "success_probability", "single_run_depth", "expected_depth"),
        formats=("%d", "%s", "%.3f", "%.0f", "%.2f"),
        rows=rows,
    )


def build_two_stage_table(n_range, alpha=1, table: GateDepthTable | None = None) -> Table:
    rows = []
    for n in n_range:
        params = _params(n, alpha, table)
        r = optimize_two_stage(n, params)
        plan = r.sequence
        p1, p2, d1, d2 = _plan_numbers(plan, params)
        rows.append((n, str(plan.stage1), str(plan.stage2), p1, p2, d1, d2, r.expected_depth))
    return Table(
        name="two_stage",
        title=f"Two-stage MED (alpha={alpha})",
        columns=(
            "n", "stage1_sequence", "stage2_sequence",
            "stage1_probability", "stage2_probability",
            "stage1_depth", "stage2_depth", "expected_depth",
        ),
        formats=("%d", "%s", "%s", "%.3f", "%.3f", "%.0f", "%.0f", "%.2f"),
        rows=rows,
    )


def build_critical_table(n_range, tol=1e-3, table: GateDepthTable | None = None) -> Table:
    rows = []
    for n in n_range:
        a1 = critical_alpha(n, "one_stage", tol, table=table)
        a2 = critical_alpha(n, "two_stage", tol, table=table) if n >= 4 else None
        rows.append((n, a1.alpha_c, None if a2 is None else a2.alpha_c))
    return Table(
        name="critical",
        title="Critical oracle-to-diffusion ratios",
        columns=("n", "alpha_c1", "alpha_c2"),
        formats=("%d", "%.2f", "%.2f"),
        rows=rows,
    )


def build_depth_figure_data(n_range, alpha=1, table: GateDepthTable | None = None) -> Table:
    """Data behind the MED/depth comparison figure: expected depths of the
    three optimizers and the per-stage single-run depths."""
    rows = []
    for n in n_range:
        params = _params(n, alpha, table)
        g = optimize_grover(n, params)
        one = optimize_one_stage(n, params)
        two = optimize_two_stage(n, params)
        _, _, d1, d2 = _plan_numbers(two.sequence, params)
        rows.append((
            n, g.expected_depth, one.expected_depth, two.expected_depth,
            g.single_run_depth, one.single_run_depth, d1, d2,
        ))
    return Table(
        name="depth_figure",
        title=f"Expected and single-run depths (alpha={alpha})",
        columns=(
            "n", "med_grover", "med_one_stage", "med_two_stage",
            "depth_grover", "depth_one_stage", "depth_two_stage_s1", "depth_two_stage_s2",
        ),
        formats=("%d", "%.2f", "%.2f", "%.2f", "%.0f", "%.0f", "%.0f", "%.0f"),
        rows=rows,
    )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def render_md(table: Table) -> str:
    rows = table.formatted_rows()
    widths = [
        max(len(col), *(len(r[i]) for r in rows)) if rows else len(col)
        for i, col in enumerate(table.columns)
    ]
    lines = [f"### {table.title}", ""]
    lines.append("| " + " | ".join(c.ljust(w) for c, w in zip(table.columns, widths)) + " |")
    lines.append("|" + "|".join("-" * (w + 2) for w in widths) + "|")
    for row in rows:
        lines.append("| " + " | ".join(v.ljust(w) for v, w in zip(row, widths)) + " |")
    return "\n".join(lines) + "\n"


def render_csv(table: Table) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.formatted_rows():
        writer.writerow(row)
    return buf.getvalue()


def render_json(table: Table) -> dict:
    return {
        "name": table.name,
        "title": table.title,
        "columns": list(table.columns),
        "rows": [
            {col: value for col, value in zip(table.columns, row)} for row in table.rows
        ],
    }


def render(table: Table, fmt: str) -> str:
    if fmt == "md":
        return render_md(table)
    if fmt == "csv":
        return render_csv(table)
    if fmt == "json":
        import json

        return json.dumps(render_json(table), indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
