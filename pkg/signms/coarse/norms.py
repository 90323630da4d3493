# ====================================================
# Norms and Error Measures
# ----------------------------------------------------
# - Energy norm ||v||_a~ = (|sigma| grad v, grad v)^1/2
# - L2 norm through the consistent Q1 mass
# - Relative errors against a reference solution
# - ||f||_s~^-1 with weight |mu|^-1
# - Quadrature errors against closed-form u, grad u
# ====================================================

import numpy as np

from signms.assembly.elements import gauss_points, shape_gradients, shape_values
from signms.assembly.operators import (
    WeightMode,
    assemble_mass,
    assemble_stiffness,
    assemble_weighted_mass,
)
from signms.auxspace.eigen import mu_scale
from signms.errors import ConfigurationError, DomainError
from signms.mesh import TwoScaleMesh


def _fine_mesh(n_nodes):
    n = int(round(np.sqrt(n_nodes))) - 1
    if (n + 1) ** 2 != n_nodes:
        raise ConfigurationError(f"{n_nodes} values do not form a square node grid")
    return TwoScaleMesh(n, 1)


def _quadratic(matrix, v):
    return float(max(v @ (matrix @ v), 0.0))


def energy_norm(v, field, operator=None):
    v = np.asarray(v, dtype=float)
    if operator is None:
        operator = assemble_stiffness(_fine_mesh(v.size), field, WeightMode.ABSOLUTE)
    M = operator.matrix if hasattr(operator, "matrix") else operator
    return float(np.sqrt(_quadratic(M, v)))


def l2_norm(v, operator=None):
    v = np.asarray(v, dtype=float)
    if operator is None:
        operator = assemble_mass(_fine_mesh(v.size), None)
    M = operator.matrix if hasattr(operator, "matrix") else operator
    return float(np.sqrt(_quadratic(M, v)))


def relative_errors(u_ref, u_ms, field, stiffness_abs=None, mass_plain=None):
    u_ref = np.asarray(u_ref, dtype=float)
    e = u_ref - np.asarray(u_ms, dtype=float)
    if stiffness_abs is None:
        stiffness_abs = assemble_stiffness(_fine_mesh(u_ref.size), field, WeightMode.ABSOLUTE)
    if mass_plain is None:
        mass_plain = assemble_mass(_fine_mesh(u_ref.size), None)

    ref_a = energy_norm(u_ref, field, stiffness_abs)
    ref_l2 = l2_norm(u_ref, mass_plain)
    if ref_a == 0.0 or ref_l2 == 0.0:
        raise DomainError("reference solution has zero norm; relative errors are undefined")
    return energy_norm(e, field, stiffness_abs) / ref_a, l2_norm(e, mass_plain) / ref_l2


def f_sinv_norm(source, field, mesh, mu_msh=24.0):
    f = source.f if hasattr(source, "f") else np.asarray(source, dtype=float)
    weights = 1.0 / (mu_scale(mesh, mu_msh) * np.abs(field.c))
    M = assemble_weighted_mass(mesh, weights)
    return float(np.sqrt(_quadratic(M, f)))


# =====================================================
# QUADRATURE ERRORS AGAINST A CLOSED FORM
# =====================================================
def quadrature_errors(mesh, u_h, u_exact, grad_exact, field=None, order=3):
    """(L2 error, energy error, L2 norm of u, energy norm of u) by tensor Gauss quadrature."""
    u_h = np.asarray(u_h, dtype=float)
    weight = np.ones(mesh.n_cells) if field is None else np.abs(field.sigma)
    h = mesh.h
    nodes = mesh.cell_nodes
    corner = mesh.node_coords[nodes[:, 0]]
    local = u_h[nodes]

    pts, wts = gauss_points(order)
    l2_err = energy_err = l2_ref = energy_ref = 0.0
    for xi, wx in zip(pts, wts):
        for eta, wy in zip(pts, wts):
            w = wx * wy * h * h
            x = corner[:, 0] + xi * h
            y = corner[:, 1] + eta * h
            uh_q = local @ shape_values(xi, eta)
            grad_q = local @ shape_gradients(xi, eta) / h
            u_q = u_exact(x, y)
            gx, gy = grad_exact(x, y)
            l2_err += w * np.sum((u_q - uh_q) ** 2)
            l2_ref += w * np.sum(u_q ** 2)
            energy_err += w * np.sum(weight * ((gx - grad_q[:, 0]) ** 2 + (gy - grad_q[:, 1]) ** 2))
            energy_ref += w * np.sum(weight * (gx ** 2 + gy ** 2))
    return float(np.sqrt(l2_err)), float(np.sqrt(energy_err)), float(np.sqrt(l2_ref)), float(np.sqrt(energy_ref))
