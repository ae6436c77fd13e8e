"""Sweep assembly and output rendering: delimited tables, JSON, and figures."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .bounds import BoundModel, halton_weighted_bound_final, projection_bound, weighted_bound_max, weighted_bound_product
from .core import BudgetError, LogValue, WeightFamily, first_primes
from .exact import weighted_star_discrepancy_exact
from .sequences import halton_points

REPORT_COLUMNS = (
    "N",
    "exact_star",
    "bound_halton",
    "bound_six_j",
    "bound_niederreiter_classic",
    "weighted_bound_max",
    "weighted_bound_product",
    "final_bound",
)


@dataclass(frozen=True, slots=True)
class ReportRow:
    """One sweep point: exact value (when affordable) next to its upper bounds.

    ``exact_star`` is None when the critical-grid budget was exceeded;
    ``final_bound`` is None for N < 10 where its exponent is undefined.
    """

    N: int
    exact_star: float | None
    bound_halton: float
    bound_six_j: float
    bound_niederreiter_classic: float
    weighted_bound_max: float
    weighted_bound_product: float
    final_bound: float | None

    def cells(self) -> tuple[object, ...]:
        return (
            self.N,
            self.exact_star,
            self.bound_halton,
            self.bound_six_j,
            self.bound_niederreiter_classic,
            self.weighted_bound_max,
            self.weighted_bound_product,
            self.final_bound,
        )


def parse_n_range(text: str) -> list[int]:
    """Parse ``a:b[:step]`` into the inclusive integer sweep [a, a+step, ...] <= b."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"expected a:b or a:b:step, got {text!r}")
    try:
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise ValueError(f"non-integer sweep bound in {text!r}") from exc
    if step <= 0:
        raise ValueError("sweep step must be positive")
    if hi < lo:
        raise ValueError("sweep range is empty")
    return list(range(lo, hi + 1, step))


def assemble_report(
    d: int,
    sweep: list[int],
    family: WeightFamily | None = None,
    *,
    budget: int = 10**8,
    threads: int = 1,
) -> list[ReportRow]:
    """Exact weighted star discrepancy next to its bounds for each N in the sweep.

    The exact column uses the unit-weight family when none is given, which
    makes it the plain star discrepancy of the full point set.
    """
    if not sweep:
        raise ValueError("sweep range is empty")
    if min(sweep) < 2:
        raise ValueError("bounds need N >= 2; start the sweep there")
    fam = family if family is not None else WeightFamily.ones(d)
    bases = first_primes(d)
    full = tuple(range(1, d + 1))
    halton = BoundModel("halton")
    six_j = BoundModel("six-j")
    nclassic = BoundModel("niederreiter-classic")

    rows = []
    for N in sweep:
        points = halton_points(bases, N)
        try:
            exact = weighted_star_discrepancy_exact(points, fam, threads=threads, budget=budget).value
        except BudgetError:
            exact = None
        final = halton_weighted_bound_final(fam, d, N) if N >= 10 else None
        rows.append(
            ReportRow(
                N,
                exact,
                projection_bound(halton, full, N, bases),
                projection_bound(six_j, full, N),
                projection_bound(nclassic, full, N, bases),
                weighted_bound_max(fam, d, N),
                weighted_bound_product(fam, d, N),
                final,
            )
        )
    return rows


def check_report_rows(rows: list[ReportRow]) -> None:
    """Raise if any bound column undercuts the exact column where both exist."""
    slack = 1e-12
    for row in rows:
        if row.exact_star is None:
            continue
        for name in REPORT_COLUMNS[2:]:
            value = getattr(row, name)
            if value is None:
                continue
            if value < row.exact_star - slack:
                raise ArithmeticError(
                    f"bound column {name} = {value} undercuts exact {row.exact_star} at N = {row.N}"
                )


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def format_cell(value: object) -> str:
    """One output cell: blanks for missing, 17 significant digits for reals."""
    if value is None:
        return ""
    if isinstance(value, LogValue):
        return value.format_e()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render_csv(header: tuple[str, ...], rows: list[tuple[object, ...]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(c) for c in row])
    return buf.getvalue()


def render_json(header: tuple[str, ...], rows: list[tuple[object, ...]]) -> str:
    records = []
    for row in rows:
        rec = {}
        for key, value in zip(header, row):
            if isinstance(value, LogValue):
                rec[key] = value.format_e()
            else:
                rec[key] = value
        records.append(rec)
    return json.dumps(records, indent=2, sort_keys=False) + "\n"


def _table_cell(value: object) -> str:
    if value is None:
        return "-"
    if isinstance(value, LogValue):
        return value.format_decimal()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def render_table(header: tuple[str, ...], rows: list[tuple[object, ...]]) -> str:
    """Fixed-width text table for terminal reading."""
    cells = [list(header)] + [[_table_cell(c) for c in row] for row in rows]
    widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
    out = []
    for k, line in enumerate(cells):
        out.append("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip())
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def render(fmt: str, header: tuple[str, ...], rows: list[tuple[object, ...]]) -> str:
    if fmt == "csv":
        return render_csv(header, rows)
    if fmt == "json":
        return render_json(header, rows)
    if fmt == "table":
        return render_table(header, rows)
    raise ValueError(f"unknown output format {fmt!r}")


def render_report_plot(rows: list[ReportRow], path: str, *, title: str = "") -> None:
    """Log-log figure of the exact values against every bound column."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [row.N for row in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=130)
    styles = {
        "bound_halton": dict(color="#c44e52", ls="-"),
        "bound_six_j": dict(color="#dd8452", ls="--"),
        "bound_niederreiter_classic": dict(color="#937860", ls="-."),
        "weighted_bound_max": dict(color="#4c72b0", ls="-"),
        "weighted_bound_product": dict(color="#64b5cd", ls="--"),
        "final_bound": dict(color="#8172b3", ls=":"),
    }
    for name, style in styles.items():
        pts = [(n, getattr(row, name)) for n, row in zip(ns, rows) if getattr(row, name) is not None]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], label=name, lw=1.4, **style)
    exact = [(n, row.exact_star) for n, row in zip(ns, rows) if row.exact_star is not None]
    if exact:
        ax.plot(
            [p[0] for p in exact],
            [p[1] for p in exact],
            "o",
            ms=3.5,
            color="#2a2a2a",
            label="exact_star",
            zorder=5,
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("N")
    ax.set_ylabel("discrepancy / bound")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.25, lw=0.5)
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_path_for(output: str) -> str:
    """Sibling figure path: the delimited output's name with a .png suffix."""
    stem, dot, ext = output.rpartition(".")
    if dot and ext.lower() in ("csv", "json", "txt", "tsv"):
        return stem + ".png"
    return output + ".png"
