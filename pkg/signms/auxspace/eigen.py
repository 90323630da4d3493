# ====================================================
# Element Spectral Problems
# ----------------------------------------------------
# - On each coarse element K_i (no boundary conditions):
#     (|sigma| grad v, grad w) = lambda (mu |c| v, w)
#   with mu = mu_msh * H^-2
# - Keeps the l*+1 smallest eigenvalues and the first l*
#   eigenvectors, s~-orthonormal, deterministic signs
# ====================================================

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from signms import config
from signms.assembly.elements import q1_mass, q1_stiffness
from signms.assembly.operators import assemble_cells, rectangle_cell_nodes
from signms.errors import ConfigurationError, EigenSolverError

_K_LOC = q1_stiffness()
_M_LOC_UNIT = q1_mass(1.0)


@dataclass(frozen=True, eq=False)
class ElementEigenData:
    element: int
    # l*+1 ascending eigenvalues
    eigenvalues: np.ndarray
    # (local dofs, l*) s~-orthonormal eigenvectors
    vectors: np.ndarray
    local_dof_map: np.ndarray
    # S_abs @ vectors, so s~(v, psi_j) = weighted[:, j] . v_local
    weighted: np.ndarray
    # s(psi_a, psi_b) with the signed mu
    signed_gram: np.ndarray

    @property
    def l_star(self):
        return self.vectors.shape[1]

    @property
    def gap(self):
        return float(self.eigenvalues[-1])


def mu_scale(mesh, mu_msh):
    # diam(K_i)^-2 taken as H^-2
    return float(mu_msh) / mesh.H ** 2


def element_matrices(mesh, field, i, mu_msh=24.0):
    """Local (A_abs, S_abs, S_signed) on element i as dense arrays."""
    c = mesh.cells_per_coarse
    cells = mesh.element_cells(i)
    mu = mu_scale(mesh, mu_msh)
    local_mass = _M_LOC_UNIT * mesh.h ** 2
    nodes = rectangle_cell_nodes(c, c)

    A = assemble_cells(c, c, np.abs(field.sigma[cells]), _K_LOC, nodes).toarray()
    S_abs = assemble_cells(c, c, mu * np.abs(field.c[cells]), local_mass, nodes).toarray()
    S_signed = assemble_cells(c, c, mu * field.c[cells], local_mass, nodes).toarray()
    return A, S_abs, S_signed


def fix_signs(vectors):
    # First component that is clearly nonzero is made positive
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        tol = 1e-12 * np.abs(col).max()
        nz = np.flatnonzero(np.abs(col) > tol)
        if nz.size and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def solve_local_pencil(A, S_abs, l_star, element=-1):
    n = A.shape[0]
    if l_star + 1 > n:
        raise ConfigurationError(
            f"l_star={l_star} needs {l_star + 1} eigenpairs but element {element} has only {n} local dofs"
        )
    try:
        values, vectors = la.eigh(A, S_abs, subset_by_index=[0, l_star])
    except (la.LinAlgError, ValueError) as e:
        raise EigenSolverError(element, f"generalized eigensolve failed: {e}")
    if not np.all(np.isfinite(values)):
        raise EigenSolverError(element, "non-finite eigenvalues")
    return values, fix_signs(vectors)


def solve_element_eigens(mesh, field, i, l_star, mu_msh=24.0):
    if l_star < 1:
        raise ConfigurationError(f"l_star must be >= 1, got {l_star}")
    A, S_abs, S_signed = element_matrices(mesh, field, i, mu_msh)
    values, vectors = solve_local_pencil(A, S_abs, l_star, element=i)
    return _pack(mesh, i, values, vectors, S_abs, S_signed)


def check_eigenvalues(values, element=-1):
    # Constants span the kernel of the Neumann pencil; nothing may go negative
    values = np.asarray(values, dtype=float)
    if values.min() < -config.EIGEN_NEGATIVE_ATOL:
        raise EigenSolverError(element, f"negative eigenvalue {values.min():.3e}")
    if values[0] > config.EIGEN_ZERO_RTOL * max(values[-1], 1.0):
        raise EigenSolverError(element, f"first eigenvalue {values[0]:.3e} is not numerically zero")
    return values


def _pack(mesh, i, values, all_vectors, S_abs, S_signed):
    check_eigenvalues(values, element=i)
    vectors = all_vectors[:, :-1]
    return ElementEigenData(
        element=int(i),
        eigenvalues=values,
        vectors=vectors,
        local_dof_map=mesh.element_nodes(i),
        weighted=S_abs @ vectors,
        signed_gram=_symmetric(vectors.T @ S_signed @ vectors),
    )


def _symmetric(G):
    return 0.5 * (G + G.T)
