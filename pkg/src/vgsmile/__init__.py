"""Variance-gamma mixture option pricing and implied-volatility smile shapes."""

__version__ = "0.1.0"
