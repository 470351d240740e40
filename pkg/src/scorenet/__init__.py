"""Spectral analysis of bibliographic and coauthorship networks."""

__version__ = "0.1.0"
