"""Numerical estimation of classical and algorithmic fractal dimensions."""

__version__ = "0.1.0"
