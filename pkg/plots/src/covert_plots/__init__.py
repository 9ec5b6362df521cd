"""Verification figures for covert-sense CSV artifacts."""

__version__ = "0.1.0"

from .csvio import SchemaError, SweepTable, read_table
from .figures import FigureKind, FigureSpec, build_figure, render

__all__ = [
    "FigureKind",
    "FigureSpec",
    "SchemaError",
    "SweepTable",
    "build_figure",
    "read_table",
    "render",
]
