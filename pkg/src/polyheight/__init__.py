"""Exact convex geometry for heights and minima of toric bundles."""

__version__ = "0.1.0"
