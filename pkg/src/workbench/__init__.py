"""Formal-language workbench."""

from . import foundation, semilinear, vecautomata, counter, etol, matrix, fixtures, series, commutative  # noqa: F401
