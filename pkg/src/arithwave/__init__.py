"""Lattice points on circles, spectral correlations and arithmetic random waves."""

__version__ = "0.1.0"
