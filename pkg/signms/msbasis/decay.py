# ====================================================
# Localization Decay Profile
# ----------------------------------------------------
# - ||phi_glo - phi_m||_a~ and the tail energy of phi_glo
#   outside K_i^m for m = 1..m_max
# - Geometric rate theta^ from a log-linear least-squares
#   fit (scikit-learn LinearRegression)
# ====================================================

from dataclasses import dataclass
import logging

import numpy as np
from sklearn.linear_model import LinearRegression

from signms.assembly.operators import WeightMode, assemble_weighted_stiffness
from signms.assembly.reference import build_fine_operators
from signms.mesh import oversample_patch
from signms.msbasis.local_basis import PatchProblem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecayProfile:
    element: int
    index: int
    layers: tuple
    difference_energy: tuple
    tail_energy: tuple
    global_energy: float
    theta: float | None = None

    def rows(self):
        return list(zip(self.layers, self.difference_energy, self.tail_energy))


def fit_rate(layers, values, floor=0.0):
    # exp(slope) of log(value) against m, over strictly positive values
    layers = np.asarray(layers, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > floor
    if keep.sum() < 2:
        return None
    model = LinearRegression().fit(layers[keep].reshape(-1, 1), np.log(values[keep]))
    return float(np.exp(model.coef_[0]))


def _basis(problem, i, j):
    return problem.extend(problem.solve(problem.correction.target(i, j)))


def decay_profile(mesh, field, aux, k, i, j, m_max, weight=WeightMode.SIGNED, operators=None):
    ops = operators if operators is not None else build_fine_operators(mesh, field, k)
    energy = ops.stiffness_abs

    glo_problem = PatchProblem(ops, aux, oversample_patch(mesh, i, mesh.n_coarse), weight)
    phi_glo = _basis(glo_problem, i, j)
    glo_energy = np.sqrt(max(energy.quadratic_form(phi_glo), 0.0))

    abs_sigma = np.abs(field.sigma)
    layers, diffs, tails = [], [], []
    for m in range(1, m_max + 1):
        patch = oversample_patch(mesh, i, m)
        phi_m = _basis(PatchProblem(ops, aux, patch, weight), i, j)
        d = phi_glo - phi_m
        diffs.append(float(np.sqrt(max(energy.quadratic_form(d), 0.0))))

        # |sigma| weight with the patch cells switched off
        outside = abs_sigma.copy()
        outside[patch.cells] = 0.0
        A_out = assemble_weighted_stiffness(mesh, outside)
        tails.append(float(np.sqrt(max(phi_glo @ (A_out @ phi_glo), 0.0))))
        layers.append(m)

    floor = 1e-14 * max(glo_energy, 1e-300)
    theta = fit_rate(layers, diffs, floor)
    if theta is None:
        logger.info("decay fit for (i=%d, j=%d) is degenerate", i, j)
    return DecayProfile(
        element=int(i),
        index=int(j),
        layers=tuple(layers),
        difference_energy=tuple(diffs),
        tail_energy=tuple(tails),
        global_energy=float(glo_energy),
        theta=theta,
    )
