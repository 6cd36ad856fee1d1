"""Exact toolkit for Frobenius liftings modulo p^2 and related computations."""

__version__ = "0.1.0"
