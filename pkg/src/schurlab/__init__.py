"""Diameter graphs, Reuleaux bodies and Schur's bound, checked numerically."""

__version__ = "0.1.0"
