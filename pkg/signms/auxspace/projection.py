# ====================================================
# Projection pi onto V_aux
# ----------------------------------------------------
# - Elementwise s~-orthogonal projection
# - Works on broken Q1 fields: an (N, local dofs) array
#   holding each element's own nodal values, since the
#   zero-extended psi's jump across element borders
# - gather() lifts a global nodal vector to that form
# ====================================================

import numpy as np


def gather(aux, v):
    v = np.asarray(v, dtype=float)
    if v.ndim == 2:
        return v
    return v[aux.local_dofs]


def pi_coefficients(aux, v):
    # alpha[i, j] = s~(v, psi_i^j) over K_i
    broken = gather(aux, v)
    return np.einsum("enl,en->el", aux.weighted, broken)


def broken_from_coefficients(aux, alpha):
    return np.einsum("enl,el->en", aux.vectors, np.asarray(alpha, dtype=float))


def apply_pi(aux, v):
    return broken_from_coefficients(aux, pi_coefficients(aux, v))


# =====================================================
# s~ INNER PRODUCT OF BROKEN FIELDS  (|mu| weight)
# =====================================================
def s_inner(aux, u, v):
    bu = gather(aux, u)[:, aux.local_cell_nodes]
    bv = gather(aux, v)[:, aux.local_cell_nodes]
    per_cell = np.einsum("eca,ab,ecb->ec", bu, aux.local_mass, bv)
    return float(np.sum(per_cell * aux.abs_cell_weights))


def s_norm(aux, v):
    return float(np.sqrt(max(s_inner(aux, v, v), 0.0)))
