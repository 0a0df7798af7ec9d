"""Subtle Stiefel-Whitney classes of quadratic forms over a generic field."""

__version__ = "0.1.0"
