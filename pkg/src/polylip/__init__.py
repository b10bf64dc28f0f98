"""Exact polyhedral workbench for Lipschitz-type properties."""

__version__ = "0.1.0"
