# ====================================================
# Built-in Verification Suite  (signms verify)
# ----------------------------------------------------
# - Invariant and oracle checks on small meshes;
#   reference convergence runs n = 50 .. 400
# - Each check returns (passed, detail)
# - Results shown as a rich table; exit code follows
# ====================================================

import logging
import time

import numpy as np
from rich.console import Console
from rich.table import Table

from signms.assembly import (
    Q1_MASS_EXACT,
    Q1_STIFFNESS_EXACT,
    build_fine_operators,
    q1_mass,
    q1_stiffness,
    solve_reference,
)
from signms.auxspace import apply_pi, build_auxiliary_space, element_matrices, gather, s_norm
from signms.coarse import assemble_coarse_system, quadrature_errors, solve_ms
from signms.coeffs import (
    FlatInterfaceParams,
    flat_interface,
    flat_interface_exact,
    gaussian_source,
    nim_slab,
    nodal_source,
    random_inclusions,
    uniform_field,
)
from signms.mesh import build_mesh
from signms.msbasis import build_multiscale_basis

console = Console()
logger = logging.getLogger(__name__)


# =====================================================
# CHECKS
# =====================================================
def check_element_matrices():
    err = max(np.abs(q1_stiffness() - Q1_STIFFNESS_EXACT).max(), np.abs(q1_mass(1.0) - Q1_MASS_EXACT).max())
    return err < 1e-14, f"max deviation {err:.1e}"


def check_eigen_invariants():
    mesh = build_mesh(40, 8)
    worst = 0.0
    for field in (flat_interface(mesh), random_inclusions(mesh, seed=1, count=6, size_range=(2, 4)), nim_slab(mesh)):
        aux = build_auxiliary_space(mesh, field, 3)
        for data in aux.per_element:
            values = data.eigenvalues
            if values[0] > 1e-10 * values[-1] or values.min() < -1e-10:
                return False, f"element {data.element}: eigenvalues {values}"
            _, S_abs, _ = element_matrices(mesh, field, data.element)
            gram = data.vectors.T @ S_abs @ data.vectors
            worst = max(worst, np.abs(gram - np.eye(aux.l_star)).max())
    return worst < 1e-10, f"Gram deviation {worst:.1e}"


def check_projection():
    mesh = build_mesh(40, 8)
    field = flat_interface(mesh)
    aux = build_auxiliary_space(mesh, field, 3)
    ops = build_fine_operators(mesh, field, 4.0)
    rng = np.random.default_rng(0)
    worst_idem, worst_bound = 0.0, -np.inf
    for _ in range(10):
        v = rng.standard_normal(mesh.n_nodes)
        pv = apply_pi(aux, v)
        worst_idem = max(worst_idem, np.abs(apply_pi(aux, pv) - pv).max())
        lhs = s_norm(aux, gather(aux, v) - pv) ** 2
        rhs = ops.stiffness_abs.quadratic_form(v) / aux.lambda_gap
        worst_bound = max(worst_bound, lhs - rhs * (1 + 1e-10))
    ok = worst_idem < 1e-10 and worst_bound <= 0.0
    return ok, f"idempotence {worst_idem:.1e}, bound slack {worst_bound:.1e}"


def check_oracle_equivalence():
    mesh = build_mesh(16, 4)
    field = uniform_field(mesh, 1.0)
    ops = build_fine_operators(mesh, field, 1.0)
    source = gaussian_source(mesh)
    aux = build_auxiliary_space(mesh, field, 2)

    local = build_multiscale_basis(ops, aux, m=mesh.n_coarse)
    glob = build_multiscale_basis(ops, aux, m=None)
    basis_dev = abs(local.matrix - glob.matrix).max()

    load = ops.load(source)
    u_ms = solve_ms(assemble_coarse_system(glob, ops.helmholtz, load), glob)

    # Dense Galerkin projection of the reference onto span(Phi)
    u_ref = solve_reference(mesh, field, 1.0, source, operators=ops)
    Phi = glob.matrix.toarray()
    B = ops.helmholtz.toarray()
    coeffs = np.linalg.solve(Phi.T @ B @ Phi, Phi.T @ B @ u_ref)
    u_oracle = Phi @ coeffs
    A = ops.stiffness_abs.matrix
    diff = u_ms - u_oracle
    rel = np.sqrt(diff @ (A @ diff)) / np.sqrt(u_oracle @ (A @ u_oracle))

    residual = np.abs(Phi.T @ (B @ (u_ref - u_ms))).max()
    scale = np.abs(Phi.T @ load).max()
    ok = basis_dev < 1e-10 and rel < 1e-9 and residual <= 1e-8 * scale
    return ok, f"basis {basis_dev:.1e}, oracle {rel:.1e}, orthogonality {residual / scale:.1e}"


def check_reference_convergence():
    # u = sin(pi x) sin(pi y), sigma = c = 1, k = 1
    k = 1.0

    def u(x, y):
        return np.sin(np.pi * x) * np.sin(np.pi * y)

    def grad(x, y):
        return (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y), np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))

    sizes = (50, 100, 200, 400)
    l2, energy = [], []
    for n in sizes:
        mesh = build_mesh(n, 1)
        field = uniform_field(mesh, 1.0)
        source = nodal_source(mesh, lambda x, y: (2.0 * np.pi ** 2 - k ** 2) * u(x, y))
        u_h = solve_reference(mesh, field, k, source)
        e_l2, e_a, _, _ = quadrature_errors(mesh, u_h, u, grad)
        l2.append(e_l2)
        energy.append(e_a)
    # Every halving of h, not just the last one
    l2_orders = np.log2(np.array(l2[:-1]) / np.array(l2[1:]))
    energy_orders = np.log2(np.array(energy[:-1]) / np.array(energy[1:]))
    l2_order, energy_order = l2_orders[-1], energy_orders[-1]
    ok = bool(np.all(np.abs(l2_orders - 2.0) <= 0.2) and np.all(np.abs(energy_orders - 1.0) <= 0.2))
    return ok, f"L2 order {l2_order:.2f}, energy order {energy_order:.2f}"


def check_exact_solution():
    params = FlatInterfaceParams()
    t = np.linspace(0.0, 1.0, 11)
    edge = np.concatenate([t, t, np.zeros(11), np.ones(11)])
    other = np.concatenate([np.zeros(11), np.ones(11), t, t])
    u_bottom, _ = flat_interface_exact((edge, other), params)
    u_side, _ = flat_interface_exact((other, edge), params)
    u_mid, _ = flat_interface_exact((t, np.full(11, params.gamma)), params)
    worst = max(np.abs(u_bottom).max(), np.abs(u_side).max(), np.abs(u_mid).max())
    return worst < 1e-14, f"max |u| on boundary and interface {worst:.1e}"


CHECKS = [
    ("Q1 element matrices", check_element_matrices),
    ("Exact solution traces", check_exact_solution),
    ("Element eigenproblems", check_eigen_invariants),
    ("Projection pi", check_projection),
    ("Saturated basis / Galerkin oracle", check_oracle_equivalence),
    ("Reference solver convergence", check_reference_convergence),
]


def run_verification(quiet=False):
    console.print("\n[bold magenta]========== VERIFICATION ==========[/bold magenta]")
    table = Table(title="signms verify")
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Detail")
    table.add_column("Seconds", justify="right")

    all_ok = True
    for name, check in CHECKS:
        start = time.time()
        try:
            ok, detail = check()
        except Exception as e:
            logger.exception("check '%s' raised", name)
            ok, detail = False, f"{type(e).__name__}: {e}"
        all_ok &= bool(ok)
        table.add_row(name, "[green]PASS[/green]" if ok else "[red]FAIL[/red]", detail, f"{time.time() - start:.2f}")

    if not quiet:
        console.print(table)
    return all_ok
