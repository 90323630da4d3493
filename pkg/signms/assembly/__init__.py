from signms.assembly.elements import q1_stiffness, q1_mass, Q1_STIFFNESS_EXACT, Q1_MASS_EXACT
from signms.assembly.operators import (
    WeightMode,
    SparseOperator,
    assemble_cells,
    assemble_stiffness,
    assemble_mass,
    assemble_load,
    restrict,
)
from signms.assembly.reference import FineOperators, build_fine_operators, solve_reference, solve_sparse

__all__ = [
    "q1_stiffness",
    "q1_mass",
    "Q1_STIFFNESS_EXACT",
    "Q1_MASS_EXACT",
    "WeightMode",
    "SparseOperator",
    "assemble_cells",
    "assemble_stiffness",
    "assemble_mass",
    "assemble_load",
    "restrict",
    "FineOperators",
    "build_fine_operators",
    "solve_reference",
    "solve_sparse",
]
