"""Difference-based autocovariance estimation for change-point regression."""

__version__ = "0.1.0"
