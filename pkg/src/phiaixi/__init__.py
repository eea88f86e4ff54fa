"""Logical state abstraction agents with binarised CTW models and rho-UCT planning."""

__version__ = "0.1.0"
