"""Render pilotwave column files as publication-style figures."""

from plotkit.parser import ColumnFormatError, read_hcurve, read_jumps, read_trajectory
from plotkit.render import PlotSpec, render

__version__ = "0.1.0"
