"""Directional field design with piecewise power-linear polar interpolation."""

__version__ = "0.1.0b1"
