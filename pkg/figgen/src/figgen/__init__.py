"""Heatmaps and line plots from the simulator's CSV outputs."""

__version__ = "0.1.0"

from .reader import MalformedCSV, MissingColumns, ParsedCSV, parse_csv  # noqa: F401
from .render import PLOT_KINDS, PlotSpec, render  # noqa: F401
