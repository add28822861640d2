"""Exact-arithmetic analysis of dominant self-maps on split algebraic tori
and products of simple semiabelian factors in positive characteristic."""

__version__ = "0.1.0"
