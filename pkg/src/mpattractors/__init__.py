"""Attractors of semigroups with multidimensional time, with PDE labs and an experiment harness."""

__version__ = "0.1.0"
