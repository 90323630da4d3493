from signms.auxspace.eigen import (
    ElementEigenData,
    check_eigenvalues,
    element_matrices,
    mu_scale,
    solve_element_eigens,
)
from signms.auxspace.space import AuxiliarySpace, build_auxiliary_space
from signms.auxspace.projection import (
    apply_pi,
    broken_from_coefficients,
    gather,
    pi_coefficients,
    s_inner,
    s_norm,
)

__all__ = [
    "ElementEigenData",
    "check_eigenvalues",
    "element_matrices",
    "mu_scale",
    "solve_element_eigens",
    "AuxiliarySpace",
    "build_auxiliary_space",
    "apply_pi",
    "broken_from_coefficients",
    "gather",
    "pi_coefficients",
    "s_inner",
    "s_norm",
]
