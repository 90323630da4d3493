# ====================================================
# Low-Rank pi-Correction on a Patch
# ----------------------------------------------------
# - P maps interior patch dofs to aux coefficients of the
#   patch elements (s~ inner products with their psi's)
# - G[(e,a),(e,b)] = s(psi_e^a, psi_e^b), block diagonal
# - s(pi v, pi w) = (P w)^T G (P v)
# - rhs of target t (aux coefficients) = P^T G t
# ====================================================

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse

from signms.assembly.operators import WeightMode
from signms.errors import SignmsError


@dataclass(frozen=True, eq=False)
class CorrectionOperator:
    P: sparse.csr_matrix
    G: sparse.csr_matrix
    elements: tuple
    l_star: int

    @property
    def rank(self):
        return self.P.shape[0]

    def row(self, i, j):
        try:
            return self.elements.index(i) * self.l_star + j
        except ValueError:
            raise SignmsError(f"element {i} is not part of this patch")

    def target(self, i, j):
        t = np.zeros(self.rank)
        t[self.row(i, j)] = 1.0
        return t

    def rhs(self, targets):
        targets = np.asarray(targets, dtype=float)
        return self.P.T @ (self.G @ targets)

    def apply(self, w):
        return self.P.T @ (self.G @ (self.P @ w))

    def quadratic_form(self, w):
        pw = self.P @ w
        return float(pw @ (self.G @ pw))

    def matrix(self):
        return (self.P.T @ self.G @ self.P).tocsr()


def correction_operator(aux, patch, weight=WeightMode.SIGNED):
    weight = WeightMode(weight)
    mesh = aux.mesh
    l = aux.l_star
    interior = patch.interior_dofs

    pos = np.full(mesh.n_nodes, -1, dtype=np.int64)
    pos[interior] = np.arange(interior.size)

    rows, cols, vals, blocks = [], [], [], []
    for idx, e in enumerate(patch.element_set):
        if e >= aux.n_elements:
            raise SignmsError(f"no eigen data for element {e}")
        local = pos[aux.local_dofs[e]]
        mask = local >= 0
        W = aux.weighted[e][mask]
        rows.append(np.broadcast_to(idx * l + np.arange(l), W.shape).ravel())
        cols.append(np.repeat(local[mask], l))
        vals.append(W.ravel())
        if weight is WeightMode.SIGNED:
            blocks.append(aux.signed_gram[e])
        else:
            blocks.append(np.eye(l))

    n_rows = len(patch.element_set) * l
    P = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_rows, interior.size),
    ).tocsr()
    G = sparse.block_diag(blocks, format="csr")
    return CorrectionOperator(P, G, tuple(patch.element_set), l)
