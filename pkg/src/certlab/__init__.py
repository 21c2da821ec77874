"""Exact construction, conversion and verification of polynomial nonnegativity certificates."""

from .polycore import BudgetExceeded, Polynomial

__all__ = ["BudgetExceeded", "Polynomial"]
__version__ = "0.1.0"
