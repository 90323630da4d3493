from signms.coarse.galerkin import assemble_coarse_system, solve_ms
from signms.coarse.norms import (
    energy_norm,
    f_sinv_norm,
    l2_norm,
    quadrature_errors,
    relative_errors,
)
from signms.coarse.diagnostics import SolveReport, resolution_ratio

__all__ = [
    "assemble_coarse_system",
    "solve_ms",
    "energy_norm",
    "f_sinv_norm",
    "l2_norm",
    "quadrature_errors",
    "relative_errors",
    "SolveReport",
    "resolution_ratio",
]
