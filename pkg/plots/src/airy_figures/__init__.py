"""Figure renderer for lattice-airy simulation artifacts."""

__version__ = "0.1.0"

from .io import InputError, read_fit, read_map, read_table
from .render import FIGURE_IDS, PlotJob, build_figure, render
