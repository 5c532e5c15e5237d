"""Static figure panels for edge-synchronization simulation outputs."""

from .panels import PANEL_KINDS, PanelSpec, read_csv, render

__version__ = "0.1.0"
