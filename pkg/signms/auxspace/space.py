# ====================================================
# Global Auxiliary Space V_aux
# ----------------------------------------------------
# - Runs every element eigensolve (joblib threads),
#   reusing results for elements with identical cells
# - Stacks vectors / weighted vectors for fast pi
# - Spectral gap Lambda = min_i lambda_i^{l*+1}
# ====================================================

from contextlib import nullcontext
from dataclasses import dataclass
from functools import cached_property
from threading import Lock
import logging
import time

import numpy as np
from joblib import Parallel, delayed
from rich.console import Console
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from threadpoolctl import threadpool_limits

from signms import config
from signms.assembly.elements import q1_mass
from signms.assembly.operators import rectangle_cell_nodes
from signms.auxspace.eigen import _pack, element_matrices, mu_scale, solve_local_pencil
from signms.errors import ConfigurationError

console = Console()
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class AuxiliarySpace:
    mesh: object
    field: object
    per_element: tuple
    l_star: int
    mu_msh: float = 24.0

    @property
    def n_elements(self):
        return len(self.per_element)

    @property
    def dimension(self):
        return self.n_elements * self.l_star

    @cached_property
    def lambda_gap(self):
        return float(min(d.eigenvalues[self.l_star] for d in self.per_element))

    @property
    def mu(self):
        return mu_scale(self.mesh, self.mu_msh)

    # =====================================================
    # STACKED VIEWS  (N, local dofs, l*)
    # =====================================================
    @cached_property
    def local_dofs(self):
        return np.stack([d.local_dof_map for d in self.per_element])

    @cached_property
    def vectors(self):
        return np.stack([d.vectors for d in self.per_element])

    @cached_property
    def weighted(self):
        return np.stack([d.weighted for d in self.per_element])

    @cached_property
    def signed_gram(self):
        return np.stack([d.signed_gram for d in self.per_element])

    # Cellwise data for s~ norms of broken fields
    @cached_property
    def local_cell_nodes(self):
        c = self.mesh.cells_per_coarse
        return rectangle_cell_nodes(c, c)

    @cached_property
    def local_mass(self):
        return q1_mass(self.mesh.h)

    @cached_property
    def abs_cell_weights(self):
        cells = np.stack([self.mesh.element_cells(e) for e in range(self.n_elements)])
        return self.mu * np.abs(self.field.c[cells])


def _element_key(field, cells):
    return field.sigma[cells].tobytes() + field.c[cells].tobytes()


def build_auxiliary_space(mesh, field, l_star, mu_msh=24.0, n_jobs=None, quiet=True):
    if l_star < 1:
        raise ConfigurationError(f"l_star must be >= 1, got {l_star}")
    if not mu_msh > 0:
        raise ConfigurationError(f"mu_msh must be positive, got {mu_msh}")
    if field.sigma.size != mesh.n_cells:
        raise ConfigurationError(f"field has {field.sigma.size} cells but the mesh has {mesh.n_cells}")

    start = time.time()
    n_jobs = n_jobs or config.worker_count()

    # Elements with identical cell values share one eigensolve
    cache = {}
    cache_lock = Lock()

    def solve(i):
        key = _element_key(field, mesh.element_cells(i))
        with cache_lock:
            hit = cache.get(key)
        A, S_abs, S_signed = element_matrices(mesh, field, i, mu_msh)
        if hit is None:
            values, vectors = solve_local_pencil(A, S_abs, l_star, element=i)
            with cache_lock:
                cache[key] = (values, vectors)
        else:
            values, vectors = hit
        return _pack(mesh, i, values, vectors, S_abs, S_signed)

    results = [None] * mesh.n_elements
    progress = Progress(
        TextColumn("[bold cyan]Element eigensolves"),
        BarColumn(bar_width=None),
        "[progress.percentage]{task.percentage:>3.0f}%",
        TimeElapsedColumn(),
        console=console,
        transient=True,
        disable=quiet,
    )
    with progress, (threadpool_limits(limits=1) if n_jobs > 1 else nullcontext()):
        task = progress.add_task("eigen", total=mesh.n_elements)
        runner = Parallel(n_jobs=n_jobs, prefer="threads", return_as="generator")
        for i, data in enumerate(runner(delayed(solve)(i) for i in range(mesh.n_elements))):
            results[i] = data
            progress.advance(task)

    aux = AuxiliarySpace(mesh, field, tuple(results), int(l_star), float(mu_msh))
    elapsed = round(time.time() - start, 2)
    logger.info(
        "auxiliary space: %d elements, l*=%d, %d distinct eigensolves, Lambda=%.4e (%.2fs)",
        mesh.n_elements, l_star, len(cache), aux.lambda_gap, elapsed,
    )
    return aux
