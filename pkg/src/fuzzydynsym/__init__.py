"""Fuzzy-space Coulomb and charge-dyon dynamical symmetry toolkit."""

__version__ = "0.1.0"
