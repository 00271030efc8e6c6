"""Finite-data tools for poset-filtered bordered Floer structures over F2."""

__version__ = "0.1.0"
