"""Emission of simulation results: summary CSV and SVG figures.

The CSV schema is fixed and locale-independent (dot decimals, LF endings,
shortest round-trip float formatting), so identical simulations produce
byte-identical files.  Figures are rendered with matplotlib's SVG backend
with hashing salted to a constant and the creation-date metadata stripped,
which makes the SVG output diffable as well.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .simulate import SimCellSummary

__all__ = ["CSV_COLUMNS", "write_csv", "render_figures"]

CSV_COLUMNS = (
    "lambda",
    "n",
    "true_g",
    "mean_g_hat",
    "mean_g_bc",
    "rel_bias_std",
    "rel_bias_bc",
    "mse_std",
    "mse_bc",
    "degenerate_count",
    "reps",
    "seed",
)


def _row(summary: SimCellSummary) -> list[str]:
    return [
        repr(summary.lam),
        str(summary.n),
        repr(summary.true_g),
        repr(summary.mean_g_hat),
        repr(summary.mean_g_bc),
        repr(summary.rel_bias_std),
        repr(summary.rel_bias_bc),
        repr(summary.mse_std),
        repr(summary.mse_bc),
        str(summary.degenerate_count),
        str(summary.reps),
        str(summary.seed),
    ]


def write_csv(summaries: list[SimCellSummary], path: str | Path) -> Path:
    """Write one row per cell in the given order; returns the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for summary in summaries:
            writer.writerow(_row(summary))
    return path


_SERIES_STYLE = {
    # estimator -> (linestyle, marker, fill)
    "standard": ("--", "o", "none"),
    "corrected": ("-", "s", "full"),
}
_COLORS = plt.rcParams["axes.prop_cycle"].by_key()["color"]


def _plot_metric(summaries, std_field: str, bc_field: str, ylabel: str, title: str, log_y: bool):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    rates = sorted({s.lam for s in summaries})
    for color_idx, lam in enumerate(rates):
        cells = sorted((s for s in summaries if s.lam == lam), key=lambda s: s.n)
        ns = [c.n for c in cells]
        color = _COLORS[color_idx % len(_COLORS)]
        for label, field in (("standard", std_field), ("corrected", bc_field)):
            style, marker, fill = _SERIES_STYLE[label]
            ax.plot(
                ns,
                [getattr(c, field) for c in cells],
                linestyle=style,
                marker=marker,
                fillstyle=fill,
                color=color,
                label=f"λ={lam:g}, {label}",
            )
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("sample size n")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    return fig


def render_figures(
    summaries: list[SimCellSummary],
    svg_dir: str | Path,
    log_y: bool = False,
) -> tuple[Path, Path]:
    """Render the two summary figures; returns (bias path, mse path).

    Figure 1 plots relative bias against sample size, figure 2 the mean
    squared error, one line per rate for each of the two estimators.
    """
    if not summaries:
        raise ValueError("render_figures requires at least one cell summary")
    svg_dir = Path(svg_dir)
    svg_dir.mkdir(parents=True, exist_ok=True)
    plt.rcParams["svg.hashsalt"] = "ztpgini"
    jobs = (
        ("relative_bias.svg", "rel_bias_std", "rel_bias_bc", "relative bias", "Relative bias against sample size"),
        ("mse.svg", "mse_std", "mse_bc", "mean squared error", "Mean squared error against sample size"),
    )
    paths = []
    for filename, std_field, bc_field, ylabel, title in jobs:
        fig = _plot_metric(summaries, std_field, bc_field, ylabel, title, log_y)
        out = svg_dir / filename
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
        paths.append(out)
    return paths[0], paths[1]
