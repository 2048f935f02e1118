"""Polyhedral norms, T-sets and weighted-composition isometries on C(X, E)."""

__version__ = "0.1.0"
