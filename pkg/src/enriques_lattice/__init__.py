"""Exact lattice and dual-graph computations for Enriques surfaces with
finitely many (-2)-curves."""

__version__ = "0.1.0"
