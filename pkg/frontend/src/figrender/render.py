"""Figure renderers for the simulator's result tables.

Every renderer validates the column contract first, draws with the Agg
backend at fixed DPI, and writes the PNG atomically (temp file + rename), so
a failed render never leaves a partial output behind.  Contour figures draw
the dashed threshold level recorded in the table metadata (coupling = 1 MHz,
cooperativity = 1).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .tables import ContractError, Table, column_diff_report, read_table  # noqa: E402

DPI = 150

FIGURE_IDS = ("fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3", "fig4a", "fig4b")


@dataclass
class PlotSpec:
    figure: str
    inputs: list[str]
    output: str
    logx: bool | None = None       # override per-figure default
    logy: bool | None = None
    contour_levels: list[float] = field(default_factory=list)


@dataclass
class RenderReport:
    output: str
    tables: list[str]
    contour_levels: list[float] = field(default_factory=list)
    contour_segments: int = 0


def _require_columns(table: Table, expected: list[str]) -> None:
    missing = [c for c in expected if c not in table.columns]
    if missing:
        raise ContractError(column_diff_report(table.name, expected, table.columns))


def _load(spec: PlotSpec, n_min=1, n_max=1) -> list[Table]:
    if not (n_min <= len(spec.inputs) <= n_max):
        raise ContractError(
            f"figure {spec.figure} takes {n_min}"
            + (f"..{n_max}" if n_max != n_min else "")
            + f" input table(s), got {len(spec.inputs)}"
        )
    return [read_table(path) for path in spec.inputs]


def _finish(fig, spec: PlotSpec, report: RenderReport) -> RenderReport:
    tmp = spec.output + ".tmp"
    try:
        fig.savefig(tmp, dpi=DPI, format="png", bbox_inches="tight")
    finally:
        plt.close(fig)
    os.replace(tmp, spec.output)
    return report


def _render_fig2a(spec: PlotSpec, table: Table) -> RenderReport:
    _require_columns(table, ["r", "enhancement"])
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    ax.plot(table.column("r"), table.column("enhancement"), color="tab:blue")
    ax.set_yscale("log" if spec.logy is not False else "linear")
    ax.set_xlabel("squeezing parameter r")
    ax.set_ylabel("coupling enhancement")
    ax.grid(alpha=0.3)
    return _finish(fig, spec, RenderReport(spec.output, [table.name]))


def _render_ratio_lines(spec: PlotSpec, table: Table, xcol: str, logx: bool) -> RenderReport:
    series = [c for c in table.columns if c.startswith("ratio_")]
    if not series:
        raise ContractError(column_diff_report(table.name, [f"{xcol}", "ratio_*"], table.columns))
    _require_columns(table, [xcol])
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    x = table.column(xcol)
    for name in series:
        ax.plot(x, table.column(name), label=name.replace("ratio_", ""))
    if logx if spec.logx is None else spec.logx:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.axhline(1.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(xcol + (f" ({table.units.get(xcol, '')})" if table.units.get(xcol) else ""))
    ax.set_ylabel("tripartite / exchange coupling")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, spec, RenderReport(spec.output, [table.name]))


def _grid_from_table(table: Table, zcol: str):
    _require_columns(table, ["R", "r", zcol])
    shape = table.run_meta("grid_shape")
    R = np.asarray(table.column("R"))
    r = np.asarray(table.column("r"))
    z = np.asarray(table.column(zcol))
    if shape is None or len(shape) != 2 or shape[0] * shape[1] != len(z):
        raise ContractError(f"table {table.name!r}: metadata grid_shape missing or inconsistent")
    nR, nr = int(shape[0]), int(shape[1])
    return R.reshape(nR, nr), r.reshape(nR, nr), z.reshape(nR, nr)


def _render_map(spec: PlotSpec, table: Table, zcol: str, level_key: str,
                default_level: float, label: str) -> RenderReport:
    Rg, rg, zg = _grid_from_table(table, zcol)
    levels = spec.contour_levels or [float(table.run_meta(level_key, default_level))]
    fig, ax = plt.subplots(figsize=(4.6, 3.4))
    filled = ax.contourf(Rg, rg, np.log10(np.maximum(zg, 1e-300)), levels=31, cmap="viridis")
    fig.colorbar(filled, ax=ax, label=f"log10 {label}")
    segments = 0
    for level in levels:
        cs = ax.contour(Rg, rg, zg, levels=[level], colors="white",
                        linestyles="dashed", linewidths=1.6)
        segments += sum(len(seg) for seg in cs.allsegs)
    ax.set_xscale("log")
    ax.set_xlabel("magnet radius (nm)")
    ax.set_ylabel("squeezing parameter r")
    return _finish(fig, spec, RenderReport(spec.output, [table.name], levels, segments))


def _render_fig3(spec: PlotSpec, tables: list[Table]) -> RenderReport:
    expected = ["lambda_t", "spin_excitation", "magnon_number", "phonon_number"]
    for t in tables:
        _require_columns(t, expected)
    n = len(tables)
    ncols = 2 if n > 1 else 1
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.2 * ncols, 2.8 * nrows), squeeze=False)
    for ax in axes.ravel()[n:]:
        ax.set_visible(False)
    for ax, t in zip(axes.ravel(), tables):
        x = t.column("lambda_t")
        ax.plot(x, t.column("spin_excitation"), label="spin", color="tab:red")
        ax.plot(x, t.column("magnon_number"), label="magnon", color="tab:green")
        ax.plot(x, t.column("phonon_number"), label="phonon", color="tab:blue")
        r = t.run_meta("r")
        rates = t.run_meta("rates_lambda_units", {})
        ax.set_title(f"{t.name}: r={r}, magnon decay {rates.get('gamma_K', '?')}", fontsize=9)
        ax.set_xlabel("coupling-normalized time")
        ax.set_ylabel("occupation")
        ax.legend(fontsize=7)
        ax.grid(alpha=0.3)
    return _finish(fig, spec, RenderReport(spec.output, [t.name for t in tables]))


def _render_fig4a(spec: PlotSpec, table: Table) -> RenderReport:
    series = [c for c in table.columns if c.startswith("contangle_r")]
    if not series:
        raise ContractError(
            column_diff_report(table.name, ["lambda_t", "contangle_r*"], table.columns)
        )
    _require_columns(table, ["lambda_t"])
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    x = table.column("lambda_t")
    for name in series:
        label = "r = " + name.replace("contangle_r", "").replace("p", ".")
        ax.plot(x, table.column(name), label=label, lw=1.0)
    ax.set_xlabel("coupling-normalized time")
    ax.set_ylabel("minimum residual contangle")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    return _finish(fig, spec, RenderReport(spec.output, [table.name]))


def _render_fig4b(spec: PlotSpec, table: Table) -> RenderReport:
    expected = ["lambda_t", "min_residual_contangle", "three_tangle", "leaked_weight"]
    _require_columns(table, expected)
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    x = table.column("lambda_t")
    ax.plot(x, table.column("min_residual_contangle"), label="min residual contangle",
            color="tab:blue", lw=1.0)
    ax.plot(x, table.column("three_tangle"), label="three-tangle",
            color="tab:orange", lw=1.0, ls="--")
    ax2 = ax.twinx()
    ax2.plot(x, table.column("leaked_weight"), color="gray", lw=0.7, alpha=0.7)
    ax2.set_ylabel("leaked weight", color="gray")
    ax.set_xlabel("coupling-normalized time")
    ax.set_ylabel("entanglement measure")
    ax.set_ylim(-0.02, 1.05)
    ax.legend(fontsize=8, loc="upper right")
    ax.grid(alpha=0.3)
    return _finish(fig, spec, RenderReport(spec.output, [table.name]))


def render(spec: PlotSpec) -> RenderReport:
    """Validate the referenced tables against the contract and write the PNG."""
    if spec.figure not in FIGURE_IDS:
        raise ContractError(f"unknown figure id {spec.figure!r}; known: {', '.join(FIGURE_IDS)}")
    if spec.figure == "fig3":
        tables = _load(spec, 1, 4)
        return _render_fig3(spec, tables)
    (table,) = _load(spec)
    if spec.figure == "fig2a":
        return _render_fig2a(spec, table)
    if spec.figure == "fig2b":
        return _render_ratio_lines(spec, table, "r", logx=False)
    if spec.figure == "fig2c":
        return _render_ratio_lines(spec, table, "R", logx=True)
    if spec.figure == "fig2d":
        return _render_map(spec, table, "lambda_eff_over_2pi", "contour_level_Hz",
                           1.0e6, "coupling (Hz)")
    if spec.figure == "fig2e":
        return _render_map(spec, table, "cooperativity", "contour_level", 1.0, "cooperativity")
    if spec.figure == "fig4a":
        return _render_fig4a(spec, table)
    return _render_fig4b(spec, table)
