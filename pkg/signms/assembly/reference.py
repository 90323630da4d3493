# ====================================================
# Fine-Scale Operators and the Reference Solve
# ----------------------------------------------------
# - Bundles the assembled fine operators of one problem
#   (signed sigma/c, absolute sigma, plain mass)
# - Reference Q1 solve on free dofs with sparse LU
# - Singular or inaccurate solves raise SolverError with
#   pivot / residual diagnostics
# ====================================================

from dataclasses import dataclass
from functools import cached_property
import logging
import time

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla
from rich.console import Console

from signms import config
from signms.assembly.operators import (
    WeightMode,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    restrict,
)
from signms.errors import ConfigurationError, SolverError

console = Console()
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FineOperators:
    mesh: object
    field: object
    k: float

    @cached_property
    def stiffness(self):
        return assemble_stiffness(self.mesh, self.field, WeightMode.SIGNED)

    @cached_property
    def mass(self):
        return assemble_mass(self.mesh, self.field, WeightMode.SIGNED)

    @cached_property
    def stiffness_abs(self):
        return assemble_stiffness(self.mesh, self.field, WeightMode.ABSOLUTE)

    @cached_property
    def mass_plain(self):
        return assemble_mass(self.mesh, None)

    @cached_property
    def helmholtz(self):
        # B(u, v) = (sigma grad u, grad v) - k^2 (c u, v), no boundary rows removed
        return (self.stiffness.matrix - self.k ** 2 * self.mass.matrix).tocsr()

    def load(self, source):
        return assemble_load(self.mesh, source, self.mass_plain)


def build_fine_operators(mesh, field, k):
    if not k > 0:
        raise ConfigurationError(f"wavenumber k must be positive, got {k}")
    if field.sigma.size != mesh.n_cells:
        raise ConfigurationError(f"field has {field.sigma.size} cells but the mesh has {mesh.n_cells}")
    return FineOperators(mesh, field, float(k))


# =====================================================
# SPARSE DIRECT SOLVE WITH DIAGNOSTICS
# =====================================================
def pivot_ratio(lu):
    diag = np.abs(lu.U.diagonal())
    if diag.size == 0:
        return 1.0
    top = diag.max()
    return float(diag.min() / top) if top > 0 else 0.0


def factorize(matrix, what="system"):
    try:
        return spla.splu(sparse.csc_matrix(matrix))
    except RuntimeError as e:
        raise SolverError(f"{what} is singular", diagnostic=str(e))


def check_residual(matrix, x, rhs, rtol, what="system", lu=None):
    if not np.all(np.isfinite(x)):
        raise SolverError(f"{what} produced non-finite values",
                          diagnostic=None if lu is None else f"pivot ratio {pivot_ratio(lu):.3e}")
    scale = np.linalg.norm(rhs)
    res = np.linalg.norm(matrix @ x - rhs)
    if scale > 0 and res > rtol * scale:
        diag = f"relative residual {res / scale:.3e} > {rtol:.1e}"
        if lu is not None:
            diag += f", pivot ratio {pivot_ratio(lu):.3e}"
        raise SolverError(f"{what} is numerically singular", diagnostic=diag)
    return res / scale if scale > 0 else 0.0


def solve_sparse(matrix, rhs, rtol=config.FINE_RTOL, what="system"):
    lu = factorize(matrix, what)
    x = lu.solve(rhs)
    check_residual(matrix, x, rhs, rtol, what, lu)
    return x


# =====================================================
# REFERENCE SOLVE
# =====================================================
def solve_reference(mesh, field, k, source, operators=None, quiet=True):
    start = time.time()
    ops = operators if operators is not None else build_fine_operators(mesh, field, k)

    free = mesh.free_dofs
    A = restrict(ops.helmholtz, free)
    b = restrict(ops.load(source), free)

    u = np.zeros(mesh.n_nodes)
    if np.any(b):
        u[free] = solve_sparse(A, b, config.FINE_RTOL, what=f"fine {mesh.n_fine}x{mesh.n_fine} system")

    elapsed = round(time.time() - start, 2)
    if not quiet:
        console.print(f"[cyan]Reference solve[/cyan] {mesh.n_fine}x{mesh.n_fine}, k={k:g}: took {elapsed} seconds")
    logger.debug("reference solve on %d free dofs took %.2fs", free.size, elapsed)
    return u
