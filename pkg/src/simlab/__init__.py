"""Finite simulations of automorphism-group dynamics for Fraïssé classes."""

__version__ = "0.1.0"
