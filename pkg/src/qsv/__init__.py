"""Numerical verification of q-series summation and q-integral identities."""

__version__ = "0.1.0"
