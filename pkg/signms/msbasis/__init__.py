from signms.msbasis.correction import CorrectionOperator, correction_operator
from signms.msbasis.local_basis import (
    MultiscaleBasis,
    PatchProblem,
    build_multiscale_basis,
    compute_global_basis,
    compute_local_basis,
)
from signms.msbasis.decay import DecayProfile, decay_profile

__all__ = [
    "CorrectionOperator",
    "correction_operator",
    "MultiscaleBasis",
    "PatchProblem",
    "build_multiscale_basis",
    "compute_global_basis",
    "compute_local_basis",
    "DecayProfile",
    "decay_profile",
]
