"""Exact structure theory for the weight-0 and weight-1 spaces of shifted
lattice vertex algebras."""

__version__ = "0.1.0"
