"""Exact computer algebra toolkit certifying a symplectic resolution.

The package verifies, by exact computation over the cyclotomic field
Q(zeta_12), that two explicit blow-ups resolve the 4-dimensional symplectic
quotient singularity attached to the binary tetrahedral group, and it
reproduces the associated equivariant Hilbert scheme data (torus fixed
points, tangent dimensions, McKay quiver).
"""

from rescert.exactfield import CycNum
from rescert.multipoly import Poly, VarSet, MonOrder, parse_poly

__all__ = ["CycNum", "Poly", "VarSet", "MonOrder", "parse_poly"]

__version__ = "0.1.0"
