"""Figure construction for sweep and bounds CSV artifacts.

Three figure kinds:

* ``mse_scaling``: log-log empirical MSE against mode count, with exactly
  three bound overlays (heterodyne prediction c_het/(eps sqrt n), the
  coherent-probe quantum limit c_coh/(eps sqrt n), the ultimate limit
  c_lb/(eps sqrt n)) and a slope -1/2 reference guide.
* ``constants_comparison``: the four constants, either against the sweep's
  empirical mse * eps * sqrt(n) (from a sweep CSV) or across a
  transmissivity grid (from a bounds CSV).
* ``detection_error``: exact discrimination error and its floor against
  mode count, with the 1/2 - eps covertness line.

Rendering is a pure function of the CSV content and the spec: a fixed style
is applied, SVG hash salts and dates are pinned, and nothing else is read.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .csvio import SchemaError, SweepTable, read_table  # noqa: E402


class FigureKind(enum.Enum):
    MSE_SCALING = "mse_scaling"
    CONSTANTS_COMPARISON = "constants_comparison"
    DETECTION_ERROR = "detection_error"


@dataclass
class FigureSpec:
    input_csv: str
    kind: FigureKind
    output: str
    log_x: bool = True
    log_y: bool = True
    slope_guide: bool = True


def _epsilon_of(table: SweepTable) -> float:
    eps = table.parameters.get("epsilon")
    if eps is None:
        raise SchemaError("embedded config carries no 'epsilon' parameter")
    return float(eps)


def _style(ax, spec: FigureSpec, xlabel: str, ylabel: str) -> None:
    if spec.log_x:
        ax.set_xscale("log")
    if spec.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)


def _mse_scaling(table: SweepTable, spec: FigureSpec, ax) -> None:
    table.require("n", "mse", "c_het", "c_coh", "c_lb")
    eps = _epsilon_of(table)
    n = table.data["n"]
    root = eps * np.sqrt(n)
    ax.plot(n, table.data["mse"], "o-", color="black", label="empirical MSE")
    ax.plot(n, table.data["c_het"] / root, "-", color="tab:blue",
            label="heterodyne prediction")
    ax.plot(n, table.data["c_coh"] / root, "--", color="tab:orange",
            label="coherent-probe limit")
    ax.plot(n, table.data["c_lb"] / root, "-.", color="tab:red",
            label="ultimate limit")
    if spec.slope_guide:
        anchor = 1.6 * table.data["mse"][0] * np.sqrt(n[0])
        ax.plot(n, anchor / np.sqrt(n), ":", color="gray",
                label="slope -1/2 guide")
    _style(ax, spec, "mode count n", "mean squared error")


def _constants_comparison(table: SweepTable, spec: FigureSpec, ax) -> None:
    table.require("c_het", "c_coh", "c_sq", "c_lb")
    labels = ("c_het", "c_coh", "c_sq", "c_lb")
    if "eta" in table.data:
        x = table.data["eta"]
        for name in labels:
            ax.plot(x, table.data[name], "o-", label=name)
        spec.log_x = False
        _style(ax, spec, "transmissivity eta", "MSE constant")
    elif "n" in table.data and "mse_eps_sqrtn" in table.data:
        x = table.data["n"]
        ax.plot(x, table.data["mse_eps_sqrtn"], "ko",
                label="empirical mse * eps * sqrt(n)")
        for name in labels:
            ax.plot(x, np.full_like(x, table.data[name][0]), "--", label=name)
        _style(ax, spec, "mode count n", "MSE constant")
    else:
        raise SchemaError(
            "required column 'eta' (bounds grid) or 'mse_eps_sqrtn' (sweep) "
            "is missing"
        )


def _detection_error(table: SweepTable, spec: FigureSpec, ax) -> None:
    table.require("n", "pe_exact", "pe_bound")
    eps = _epsilon_of(table)
    n = table.data["n"]
    ax.plot(n, table.data["pe_exact"], "o-", color="black",
            label="exact discrimination error")
    ax.plot(n, table.data["pe_bound"], "--", color="tab:blue",
            label="error floor")
    ax.axhline(0.5 - eps, color="tab:red", linestyle=":",
               label=f"1/2 - eps = {0.5 - eps:g}")
    spec.log_y = False
    _style(ax, spec, "mode count n", "detection error probability")
    ax.set_ylim(0.5 - 2.5 * eps, 0.52)


_BUILDERS = {
    FigureKind.MSE_SCALING: _mse_scaling,
    FigureKind.CONSTANTS_COMPARISON: _constants_comparison,
    FigureKind.DETECTION_ERROR: _detection_error,
}


def build_figure(spec: FigureSpec):
    """Build (figure, axes) for a spec without touching the filesystem
    beyond reading the CSV."""
    table = read_table(spec.input_csv)
    plt.rcParams["svg.hashsalt"] = "covert-plots"
    fig, ax = plt.subplots(figsize=(5.0, 3.6), dpi=150)
    try:
        _BUILDERS[spec.kind](table, spec, ax)
        fig.tight_layout()
    except Exception:
        plt.close(fig)
        raise
    return fig, ax


def render(spec: FigureSpec) -> list[str]:
    """Render the figure; emits both PNG and SVG next to the output path."""
    fig, _ = build_figure(spec)
    base = Path(spec.output)
    written = []
    try:
        for suffix in (".png", ".svg"):
            target = base.with_suffix(suffix)
            metadata = {"Date": None} if suffix == ".svg" else None
            fig.savefig(target, metadata=metadata)
            written.append(str(target))
    finally:
        plt.close(fig)
    return written
