"""Twisted Hall algebra of the Kronecker quiver over small prime fields."""

__version__ = "0.1.0"
