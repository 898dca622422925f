"""Graded variable-thickness plates on a Winkler foundation: MITC4 FEM and an MLP surrogate."""

__version__ = "0.1.0"
