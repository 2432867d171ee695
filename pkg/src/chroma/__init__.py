"""Exact and Monte Carlo tools for fugacity-weighted proper colorings."""

__version__ = "0.1.0"

from .graph import Graph, cycle, generate, load_graph, path, petersen, read_graph  # noqa: F401
