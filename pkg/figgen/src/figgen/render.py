"""Rendering: CSV contract in, raster image out.

Rendering is read-only over its input and deterministic for a fixed input
file and fixed color bounds (no timestamps reach the PNG encoder).
"""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reader import MalformedCSV, MissingColumns, ParsedCSV, parse_csv  # noqa: E402

PLOT_KINDS = ("heatmap_time_axis", "heatmap_param_axes", "lineplot")

# axis labels in units of the mode frequency
_LABELS = {
    "t": r"$\omega t$",
    "omega_d": r"$\omega_d\,/\,\omega$",
    "Omega": r"$\Omega\,/\,\omega$",
    "g0": r"$g_0\,/\,\omega$",
}
_OBSERVABLE_LABELS = {
    "number": r"$\langle N \rangle$",
    "s_z": r"$\langle S_z \rangle$",
    "cutoff_projector": "cutoff-state population",
    "N": r"$\langle N \rangle$",
    "Sz": r"$\langle S_z \rangle$",
}


def _label(name: str) -> str:
    return _LABELS.get(name, name)


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    kind: str
    output: str
    vmin: float = None
    vmax: float = None
    cmap: str = "viridis"
    title: str = None
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {PLOT_KINDS}")


def _color_label(parsed: ParsedCSV) -> str:
    obs = parsed.provenance.get("observables", "")
    return _OBSERVABLE_LABELS.get(obs, obs or "value")


def _heatmap(spec, x, y, z, xlabel, ylabel, clabel, title):
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=spec.dpi)
    masked = np.ma.masked_invalid(z)
    mesh = ax.pcolormesh(
        x, y, masked, cmap=spec.cmap, vmin=spec.vmin, vmax=spec.vmax,
        shading="nearest",
    )
    fig.colorbar(mesh, ax=ax, label=clabel)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(spec.output, format="png")
    plt.close(fig)


def render(spec: PlotSpec) -> str:
    """Render one CSV to a PNG; returns the output path."""
    parsed = parse_csv(spec.input_csv)
    title = spec.title or parsed.provenance.get("preset")

    if spec.kind == "heatmap_time_axis":
        if parsed.layout != "matrix" or parsed.rows_label != "t":
            raise MalformedCSV(
                f"{spec.input_csv}: heatmap_time_axis expects a time-rows matrix"
            )
        _heatmap(
            spec,
            parsed.row_values,
            parsed.col_values,
            parsed.data.T,
            _label("t"),
            _label(parsed.cols_label),
            _color_label(parsed),
            title,
        )
    elif spec.kind == "heatmap_param_axes":
        if parsed.layout != "matrix" or parsed.rows_label == "t":
            raise MalformedCSV(
                f"{spec.input_csv}: heatmap_param_axes expects a parameter matrix"
            )
        _heatmap(
            spec,
            parsed.col_values,
            parsed.row_values,
            parsed.data,
            _label(parsed.cols_label),
            _label(parsed.rows_label),
            _color_label(parsed),
            title,
        )
    else:  # lineplot
        if parsed.layout != "columns":
            raise MalformedCSV(f"{spec.input_csv}: lineplot expects a columns layout")
        if len(parsed.columns) < 2:
            raise MissingColumns(f"{spec.input_csv}: nothing to plot")
        fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=spec.dpi)
        x = parsed.data[:, 0]
        for j, name in enumerate(parsed.columns[1:], start=1):
            ax.plot(x, parsed.data[:, j],
                    label=_OBSERVABLE_LABELS.get(name, name))
        ax.set_xlabel(_label(parsed.columns[0]))
        ax.legend()
        if spec.vmin is not None or spec.vmax is not None:
            ax.set_ylim(spec.vmin, spec.vmax)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(spec.output, format="png")
        plt.close(fig)
    return spec.output
