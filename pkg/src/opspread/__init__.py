"""Holevo-information bounds and operator spreading for bipartite quantum channels."""

__version__ = "0.1.0"
