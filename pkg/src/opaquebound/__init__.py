"""Certified lower bounds for shortest opaque sets of the unit disc and square."""

__version__ = "0.1.0"
