"""Numerical laboratory for Banach algebras of continuous kernels (generalized matrices)."""
from .algebra import (Kernel, convolve, finite_matrix_iso, finite_matrix_iso_inv, involve,
                      sup_norm, unit)
from .space import DiscreteSpace, build_space, default_deltas

__version__ = "0.1.0"

__all__ = [
    "DiscreteSpace",
    "Kernel",
    "build_space",
    "convolve",
    "default_deltas",
    "finite_matrix_iso",
    "finite_matrix_iso_inv",
    "involve",
    "sup_norm",
    "unit",
]
