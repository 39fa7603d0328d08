"""Exact-arithmetic IBL-infinity structures on dual cyclic bar complexes."""

__version__ = "0.1.0"

from .exactalg import (CyclicComplex, GradedBasis, Scalar, koszul_sign,
                       dual_basis, verify_cyclic_complex, complex_from_data)
from .complexes import builtin_complex, builtin_names, random_cyclic_complex
from .cyclic import DualCyclicBar, dibl_ops

__all__ = [
    "CyclicComplex", "GradedBasis", "Scalar", "koszul_sign", "dual_basis",
    "verify_cyclic_complex", "complex_from_data", "builtin_complex",
    "builtin_names", "random_cyclic_complex", "DualCyclicBar", "dibl_ops",
]
