# ====================================================
# Multiscale Basis Functions
# ----------------------------------------------------
# - On patch K_i^m with zero trace:
#     B(phi, w) + s(pi phi, pi w) = s(psi_i^j, pi w)
# - Solved in augmented form [[A, P^T], [G P, -I]] so the
#   correction P^T G P is never formed; one sparse LU per
#   patch serves all l* columns
# - Global basis = same system on the saturated patch
# - Patches run in joblib threads; failures aggregated
# ====================================================

from contextlib import nullcontext
from dataclasses import dataclass
from functools import cached_property
import logging
import time

import numpy as np
import scipy.sparse as sparse
from joblib import Parallel, delayed
from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from threadpoolctl import threadpool_limits

from signms import config
from signms.assembly.operators import WeightMode, restrict
from signms.assembly.reference import build_fine_operators, factorize, pivot_ratio
from signms.errors import BasisConstructionError, ConfigurationError, SignmsError, SolverError
from signms.mesh import oversample_patch
from signms.msbasis.correction import correction_operator

console = Console()
logger = logging.getLogger(__name__)


# =====================================================
# ONE PATCH SYSTEM
# =====================================================
class PatchProblem:
    def __init__(self, operators, aux, patch, weight=WeightMode.SIGNED):
        self.operators = operators
        self.aux = aux
        self.patch = patch
        self.weight = WeightMode(weight)
        self.correction = correction_operator(aux, patch, self.weight)
        self.A = restrict(operators.helmholtz, patch.interior_dofs)

    @property
    def size(self):
        return self.A.shape[0]

    @cached_property
    def _lu(self):
        if self.size == 0:
            raise SolverError(
                f"patch of element {self.patch.center_element} (m={self.patch.layers}) has no interior dofs"
            )
        corr = self.correction
        r = corr.rank
        augmented = sparse.bmat(
            [[self.A, corr.P.T], [corr.G @ corr.P, -sparse.identity(r)]],
            format="csc",
        )
        return factorize(augmented, what=f"patch system of element {self.patch.center_element}")

    def solve(self, targets):
        """Interior patch values of the basis for aux-coefficient targets (rank,) or (rank, q)."""
        targets = np.asarray(targets, dtype=float)
        rhs = self.correction.rhs(targets)
        if not np.any(rhs):
            return np.zeros(rhs.shape)
        lu = self._lu
        pad = np.zeros((self.correction.rank,) + rhs.shape[1:])
        sol = lu.solve(np.concatenate([rhs, pad]))
        phi = sol[: self.size]
        self._check(phi, rhs, lu)
        return phi

    def _check(self, phi, rhs, lu):
        cols_phi = phi.reshape(self.size, -1)
        cols_rhs = rhs.reshape(self.size, -1)
        for q in range(cols_phi.shape[1]):
            x, b = cols_phi[:, q], cols_rhs[:, q]
            if not np.all(np.isfinite(x)):
                raise SolverError("non-finite basis values", diagnostic=f"pivot ratio {pivot_ratio(lu):.3e}")
            res = np.linalg.norm(self.A @ x + self.correction.apply(x) - b)
            scale = np.linalg.norm(b)
            if scale > 0 and res > config.FINE_RTOL * scale:
                raise SolverError(
                    "patch system is numerically singular",
                    diagnostic=f"column {q}: relative residual {res / scale:.3e}, pivot ratio {pivot_ratio(lu):.3e}",
                )

    def solve_element_columns(self):
        # Columns for psi_i^1..psi_i^l of the patch's center element
        i = self.patch.center_element
        l = self.aux.l_star
        targets = np.zeros((self.correction.rank, l))
        for j in range(l):
            targets[self.correction.row(i, j), j] = 1.0
        return self.solve(targets)

    def extend(self, interior_values):
        out = np.zeros(self.aux.mesh.n_nodes)
        out[self.patch.interior_dofs] = interior_values
        return out


# =====================================================
# BASIS CONTAINER
# =====================================================
@dataclass(frozen=True, eq=False)
class MultiscaleBasis:
    # (n_nodes, N * l*) sparse columns, column = i * l* + j
    matrix: sparse.csc_matrix
    l_star: int
    layers: int
    patches: tuple
    mode: str

    @property
    def n_columns(self):
        return self.matrix.shape[1]

    def column_index(self, i, j):
        return i * self.l_star + j

    def column(self, i, j):
        return self.matrix[:, self.column_index(i, j)].toarray().ravel()

    def support(self, i, j):
        return self.patches[i]


def _operators(mesh, field, k, operators):
    if operators is not None:
        return operators
    return build_fine_operators(mesh, field, k)


def compute_local_basis(mesh, field, aux, k, i, j, m, weight=WeightMode.SIGNED, operators=None):
    if not 0 <= j < aux.l_star:
        raise IndexError(f"basis index j={j} out of range [0, {aux.l_star})")
    ops = _operators(mesh, field, k, operators)
    patch = oversample_patch(mesh, i, m)
    problem = PatchProblem(ops, aux, patch, weight)
    try:
        values = problem.solve(problem.correction.target(i, j))
    except SolverError as e:
        raise SolverError(f"basis (i={i}, j={j}, m={m}) failed", diagnostic=str(e))
    return problem.extend(values)


def compute_global_basis(mesh, field, aux, k, i, j, weight=WeightMode.SIGNED, operators=None):
    # Saturated patch: test space is all of V
    return compute_local_basis(mesh, field, aux, k, i, j, mesh.n_coarse, weight, operators)


# =====================================================
# ALL COLUMNS
# =====================================================
def build_multiscale_basis(operators, aux, m=None, weight=WeightMode.SIGNED, n_jobs=None, quiet=True):
    mesh = aux.mesh
    l = aux.l_star
    mode = "global" if m is None else "localized"
    layers = mesh.n_coarse if m is None else int(m)
    if layers < 0:
        raise ConfigurationError(f"oversampling layers must be >= 0, got m={m}")

    start = time.time()
    n_jobs = n_jobs or config.worker_count()

    def solve(i):
        patch = oversample_patch(mesh, i, layers)
        try:
            problem = PatchProblem(operators, aux, patch, weight)
            return i, patch, problem.solve_element_columns(), None
        except SignmsError as e:
            return i, patch, None, str(e)

    rows, cols, vals, patches, failures = [], [], [], [None] * mesh.n_elements, []
    progress = Progress(
        TextColumn(f"[bold cyan]Patch solves (m={layers})"),
        BarColumn(bar_width=None),
        "[progress.percentage]{task.percentage:>3.0f}%",
        TimeElapsedColumn(),
        console=console,
        transient=True,
        disable=quiet,
    )
    with progress, (threadpool_limits(limits=1) if n_jobs > 1 else nullcontext()):
        task = progress.add_task("patches", total=mesh.n_elements)
        runner = Parallel(n_jobs=n_jobs, prefer="threads", return_as="generator")
        for i, patch, values, error in runner(delayed(solve)(i) for i in range(mesh.n_elements)):
            patches[i] = patch
            progress.advance(task)
            if error is not None:
                failures.extend((i, j, layers, error) for j in range(l))
                continue
            interior = patch.interior_dofs
            for j in range(l):
                col = values[:, j]
                nz = col != 0.0
                if not np.any(nz):
                    failures.append((i, j, layers, "basis column is identically zero"))
                    continue
                rows.append(interior[nz])
                cols.append(np.full(int(nz.sum()), i * l + j, dtype=np.int64))
                vals.append(col[nz])

    if failures:
        raise BasisConstructionError(failures)

    Phi = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.n_nodes, mesh.n_elements * l),
    ).tocsc()
    elapsed = round(time.time() - start, 2)
    logger.info("%s basis: %d columns, m=%d, nnz=%d (%.2fs)", mode, Phi.shape[1], layers, Phi.nnz, elapsed)
    return MultiscaleBasis(Phi, l, layers, tuple(patches), mode)
