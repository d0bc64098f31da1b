"""Render operating-characteristic figures from expgi results CSVs."""

from .render import FIGURE_KINDS, FigureCsvError, FigureSpec, load_results, render

__all__ = ["FIGURE_KINDS", "FigureCsvError", "FigureSpec", "load_results", "render"]
