# ====================================================
# Source Terms and the Flat-Interface Exact Solution
# ----------------------------------------------------
# - Gaussian sources (normalized or plain beam form)
# - Closed-form u and matching f for the flat interface
# - Nodal evaluation helpers returning SourceField
# ====================================================

from dataclasses import dataclass

import numpy as np

from signms.coeffs.fields import SourceField
from signms.errors import ConfigurationError


@dataclass(frozen=True)
class FlatInterfaceParams:
    sigma_plus: float = 1.0
    sigma_minus_mag: float = 3.0
    gamma: float = 0.5
    k: float = 4.0


# =====================================================
# FLAT INTERFACE EXACT SOLUTION
# u = -s- * P in Omega+,  u = s+ * P in Omega-,
# P = x1(x1-1) x2(x2-1)(x2-gamma)
# =====================================================
def flat_interface_exact(point, params=FlatInterfaceParams()):
    x1 = np.asarray(point[0], dtype=float)
    x2 = np.asarray(point[1], dtype=float)
    sp, sm, g, k = params.sigma_plus, params.sigma_minus_mag, params.gamma, params.k

    qx = x1 * (x1 - 1.0)
    qy = x2 * (x2 - 1.0) * (x2 - g)
    poly = qx * qy
    upper = x2 > g
    u = np.where(upper, -sm * poly, sp * poly)

    # -div(sigma grad u) - k^2 c u with sigma = c piecewise constant:
    # both sides reduce to s+ s- (Laplace(P) + k^2 P)
    lap = 2.0 * qy + qx * (6.0 * x2 - 2.0 * (g + 1.0))
    f = sp * sm * (lap + k ** 2 * poly)

    if u.ndim == 0:
        return float(u), float(f)
    return u, f


def flat_interface_source(mesh, params=FlatInterfaceParams()):
    xy = mesh.node_coords
    _, f = flat_interface_exact((xy[:, 0], xy[:, 1]), params)
    return SourceField(f)


def flat_interface_nodal_solution(mesh, params=FlatInterfaceParams()):
    xy = mesh.node_coords
    u, _ = flat_interface_exact((xy[:, 0], xy[:, 1]), params)
    return u


# =====================================================
# GAUSSIAN SOURCE
# =====================================================
def gaussian_source(mesh, center=(0.5, 0.5), spread=0.05, normalized=True):
    if not spread > 0:
        raise ConfigurationError(f"gaussian spread must be positive, got {spread}")
    xy = mesh.node_coords
    r2 = (xy[:, 0] - center[0]) ** 2 + (xy[:, 1] - center[1]) ** 2
    values = np.exp(-r2 / (2.0 * spread ** 2))
    if normalized:
        values = values / (spread * np.sqrt(2.0 * np.pi))
    return SourceField(values)


def nodal_source(mesh, func):
    # Evaluate any f(x, y) at the fine nodes
    xy = mesh.node_coords
    return SourceField(np.broadcast_to(func(xy[:, 0], xy[:, 1]), (mesh.n_nodes,)).copy())
