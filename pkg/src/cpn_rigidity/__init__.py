"""Exact and numerical checks for spectral rigidity of complex projective space."""

__version__ = "0.1.0"
