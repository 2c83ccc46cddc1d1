"""Ordinal Turing machines, idealized agent machines and the simulations between them."""

__version__ = "0.1.0"
