"""Static figure rendering for the bailout-game sweep CSVs."""

from .render import PANELS, FigureSpec, SchemaError, render

__all__ = ["PANELS", "FigureSpec", "SchemaError", "render"]
