# ====================================================
# Coarse Multiscale Galerkin System
# ----------------------------------------------------
# - K = Phi^T (A - k^2 M) Phi,  F = Phi^T b
# - Dense LU up to DENSE_COARSE_LIMIT unknowns, sparse
#   LU above
# - A singular K points at inf-sup failure: raise with a
#   hint to grow m or l*
# ====================================================

import logging

import numpy as np
import scipy.linalg as la
import scipy.sparse as sparse

from signms import config
from signms.assembly.reference import check_residual, solve_sparse
from signms.errors import SignmsError, SolverError

logger = logging.getLogger(__name__)

_HINT = "try more oversampling layers m or more basis functions l_star"


def assemble_coarse_system(basis, helmholtz, load):
    Phi = basis.matrix if hasattr(basis, "matrix") else basis
    B = helmholtz.matrix if hasattr(helmholtz, "matrix") else helmholtz
    if Phi.shape[0] != B.shape[0] or np.shape(load)[0] != B.shape[0]:
        raise SignmsError(
            f"dimension mismatch: basis rows {Phi.shape[0]}, operator {B.shape}, load {np.shape(load)}"
        )
    if Phi.shape[1] == 0:
        raise SignmsError("empty multiscale basis")

    K = (Phi.T @ (B @ Phi)).tocsr()
    F = Phi.T @ load

    top = abs(K).max() if K.nnz else 0.0
    asym = abs(K - K.T).max() if K.nnz else 0.0
    if top > 0 and asym > 1e-10 * top:
        raise SignmsError(f"coarse matrix is not symmetric (relative asymmetry {asym / top:.2e})")
    # Remove rounding asymmetry
    K = ((K + K.T) * 0.5).tocsr()
    return K, np.asarray(F, dtype=float)


def solve_coarse(K, F):
    n = K.shape[0]
    if not np.any(F):
        return np.zeros(n)
    if n <= config.DENSE_COARSE_LIMIT:
        dense = K.toarray() if sparse.issparse(K) else np.asarray(K)
        try:
            x = la.solve(dense, F, assume_a="sym")
        except la.LinAlgError as e:
            raise SolverError(f"coarse matrix is singular; {_HINT}", diagnostic=str(e))
        try:
            check_residual(dense, x, F, config.COARSE_RTOL, what="coarse system")
        except SolverError as e:
            raise SolverError(f"{e}; {_HINT}")
        return x
    try:
        return solve_sparse(sparse.csr_matrix(K), F, config.COARSE_RTOL, what="coarse system")
    except SolverError as e:
        raise SolverError(f"{e}; {_HINT}")


def solve_ms(coarse_system, basis):
    K, F = coarse_system
    coeffs = solve_coarse(K, F)
    Phi = basis.matrix if hasattr(basis, "matrix") else basis
    logger.debug("coarse solve: %d unknowns", K.shape[0])
    return np.asarray(Phi @ coeffs).ravel()
