"""Numerical laboratory for projective and dual flatness of real and complex Finsler metrics."""

__version__ = "0.1.0"
