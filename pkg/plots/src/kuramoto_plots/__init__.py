"""Render figures from hebbian-kuramoto CSV files.

Consumes only the documented CSV schemas; never recomputes any dynamics.
"""

__version__ = "0.1.0"

from .figures import FigureSpec, SchemaError, render

__all__ = ["FigureSpec", "SchemaError", "render"]
