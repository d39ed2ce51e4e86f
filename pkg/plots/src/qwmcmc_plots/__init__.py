"""Figure rendering for qwmcmc experiment outputs."""

from .render import DEFAULT_CMAP, KINDS, FigureRequest, PlotError, render

__version__ = "0.1.0"
