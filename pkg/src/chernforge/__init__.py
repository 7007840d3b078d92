"""Chern-Weil forms, regular 1-form tuples and exact-form decompositions on flat tori."""
from .errors import ChernforgeError

__version__ = "0.1.0"

__all__ = ["ChernforgeError", "__version__"]
