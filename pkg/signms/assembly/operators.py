# ====================================================
# Fine-Scale Q1 Assembly
# ----------------------------------------------------
# - Stiffness / mass with cellwise-constant weights,
#   signed or absolute (|sigma|, |c|)
# - Same routine assembles the whole grid or any cell
#   rectangle (element-local Neumann matrices)
# - Load vector from nodal interpolation of f
# - Principal-submatrix restriction to dof subsets
# ====================================================

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sparse

from signms.assembly.elements import q1_mass, q1_stiffness
from signms.errors import ConfigurationError

_K_LOC = q1_stiffness()
_M_LOC_UNIT = q1_mass(1.0)


class WeightMode(str, Enum):
    SIGNED = "signed"
    ABSOLUTE = "absolute"

    def apply(self, values):
        return np.abs(values) if self is WeightMode.ABSOLUTE else values


@dataclass(frozen=True, eq=False)
class SparseOperator:
    matrix: sparse.csr_matrix
    mode: WeightMode = WeightMode.SIGNED
    symmetric: bool = True

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def __matmul__(self, v):
        return self.matrix @ v

    def quadratic_form(self, v):
        v = np.asarray(v)
        return float(v @ (self.matrix @ v))

    def asymmetry(self):
        diff = abs(self.matrix - self.matrix.T)
        return float(diff.max()) if diff.nnz else 0.0


# =====================================================
# GENERIC RECTANGLE ASSEMBLY
# nx x ny cells of side h, nodes row-major (nx+1)(ny+1)
# =====================================================
def rectangle_cell_nodes(nx, ny):
    cx, cy = np.meshgrid(np.arange(nx), np.arange(ny))
    base = (cy * (nx + 1) + cx).ravel().astype(np.int64)
    return np.column_stack([base, base + 1, base + nx + 2, base + nx + 1])


def assemble_cells(nx, ny, weights, local, cell_nodes=None):
    weights = np.asarray(weights, dtype=float).ravel()
    if weights.size != nx * ny:
        raise ConfigurationError(f"{weights.size} cell weights for a {nx}x{ny} cell grid")
    if cell_nodes is None:
        cell_nodes = rectangle_cell_nodes(nx, ny)
    n_nodes = (nx + 1) * (ny + 1)

    rows = np.repeat(cell_nodes, 4, axis=1).ravel()
    cols = np.tile(cell_nodes, (1, 4)).ravel()
    vals = (weights[:, None] * local.ravel()[None, :]).ravel()
    A = sparse.coo_matrix((vals, (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()
    A.sum_duplicates()
    return A


def _check_field(mesh, field):
    if field is not None and field.sigma.size != mesh.n_cells:
        raise ConfigurationError(
            f"field has {field.sigma.size} cells but the mesh has {mesh.n_cells}"
        )


# =====================================================
# STIFFNESS  (sigma grad u, grad v)
# =====================================================
def assemble_stiffness(mesh, field, mode=WeightMode.SIGNED):
    mode = WeightMode(mode)
    _check_field(mesh, field)
    weights = np.ones(mesh.n_cells) if field is None else mode.apply(field.sigma)
    A = assemble_cells(mesh.n_fine, mesh.n_fine, weights, _K_LOC, mesh.cell_nodes)
    return SparseOperator(A, mode)


# =====================================================
# MASS  scale * (c u, v)
# =====================================================
def assemble_mass(mesh, field, mode=WeightMode.SIGNED, scale=1.0):
    mode = WeightMode(mode)
    _check_field(mesh, field)
    if not scale > 0:
        raise ConfigurationError(f"mass scale must be positive, got {scale}")
    weights = np.ones(mesh.n_cells) if field is None else mode.apply(field.c)
    local = _M_LOC_UNIT * mesh.h ** 2
    M = assemble_cells(mesh.n_fine, mesh.n_fine, scale * weights, local, mesh.cell_nodes)
    return SparseOperator(M, mode)


def assemble_weighted_mass(mesh, cell_weights):
    local = _M_LOC_UNIT * mesh.h ** 2
    return assemble_cells(mesh.n_fine, mesh.n_fine, cell_weights, local, mesh.cell_nodes)


def assemble_weighted_stiffness(mesh, cell_weights):
    return assemble_cells(mesh.n_fine, mesh.n_fine, cell_weights, _K_LOC, mesh.cell_nodes)


# =====================================================
# LOAD  (f, v) with f the nodal interpolant
# =====================================================
def assemble_load(mesh, source, mass=None):
    f = source.f if hasattr(source, "f") else np.asarray(source, dtype=float)
    if f.size != mesh.n_nodes:
        raise ConfigurationError(f"source has {f.size} nodal values but the mesh has {mesh.n_nodes} nodes")
    if mass is None:
        mass = assemble_mass(mesh, None)
    M = mass.matrix if isinstance(mass, SparseOperator) else mass
    return M @ f


# =====================================================
# RESTRICTION TO A DOF SUBSET
# =====================================================
def _check_dofs(dofs, size):
    dofs = np.asarray(dofs, dtype=np.int64).ravel()
    if dofs.size and (dofs.min() < 0 or dofs.max() >= size):
        raise IndexError(f"dof indices out of range [0, {size})")
    if np.unique(dofs).size != dofs.size:
        raise IndexError("duplicate dof indices in restriction")
    return dofs


def restrict(op, dofs):
    if isinstance(op, SparseOperator):
        dofs = _check_dofs(dofs, op.dimension)
        sub = op.matrix[dofs][:, dofs].tocsr()
        return SparseOperator(sub, op.mode, op.symmetric)
    if sparse.issparse(op):
        dofs = _check_dofs(dofs, op.shape[0])
        return op[dofs][:, dofs].tocsr()
    v = np.asarray(op)
    dofs = _check_dofs(dofs, v.shape[0])
    return v[dofs]
