"""tanatlas: computational dynamics of the family lambda * tan^p(z^q).

Orbit and parameter classification, Boettcher coordinates and rays,
symbolic coding of Cantor Julia sets, landmark parameters (centers,
Misiurewicz, parabolic, virtual-cycle), and raster atlases of the
dynamic and parameter planes.
"""

from .core import (
    AT_INFINITY,
    BranchIndex,
    BranchUndefinedError,
    FamilyParams,
    SingularValueError,
    asymptotic_values,
    branch_pole,
    derivative,
    evaluate,
    inverse_branch,
    is_infinite,
    pole,
    sector_roots,
    symmetry_image,
    zero,
)

__version__ = "0.1.0"
