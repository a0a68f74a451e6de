"""Permuted random walks on regular trees: exact verification and simulation."""

from .tree import BoundaryError, RegularTree

__all__ = ["BoundaryError", "RegularTree"]
__version__ = "0.1.0"
