"""Truncated simplicial homotopy at desk scale.

Finite simplicial sets, Kan fibrancy, coskeleta and Postnikov sections,
low-degree homotopy invariants, simplicial groupoids and simplicial
presheaves over finite sites.
"""

from .config import Budget
from .exceptions import NTypesError
from .scomplex import SimplexRef
from .scomplex import SMap
from .scomplex import SSet

__all__ = ["Budget", "NTypesError", "SMap", "SSet", "SimplexRef"]
