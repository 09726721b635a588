"""Render spinmagphon result tables into publication-style PNG figures."""

__version__ = "0.1.0"

from .render import FIGURE_IDS, PlotSpec, RenderReport, render  # noqa: F401
from .tables import ContractError, Table, read_table  # noqa: F401
