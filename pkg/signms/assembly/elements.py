# ====================================================
# Q1 Element Matrices on a Square Cell
# ----------------------------------------------------
# - Bilinear shape functions, local node order
#   (0,0), (1,0), (1,1), (0,1)
# - 2x2 Gauss quadrature (exact for Q1 products)
# - Stiffness is independent of h in 2D, mass scales h^2
# ====================================================

import numpy as np

_GAUSS_1D = np.array([0.5 - 0.5 / np.sqrt(3.0), 0.5 + 0.5 / np.sqrt(3.0)])
_GAUSS_W = np.array([0.5, 0.5])

# Closed forms for a unit-weight square cell
Q1_STIFFNESS_EXACT = np.array([
    [4.0, -1.0, -2.0, -1.0],
    [-1.0, 4.0, -1.0, -2.0],
    [-2.0, -1.0, 4.0, -1.0],
    [-1.0, -2.0, -1.0, 4.0],
]) / 6.0

Q1_MASS_EXACT = np.array([
    [4.0, 2.0, 1.0, 2.0],
    [2.0, 4.0, 2.0, 1.0],
    [1.0, 2.0, 4.0, 2.0],
    [2.0, 1.0, 2.0, 4.0],
]) / 36.0


def _shape(xi, eta):
    return np.array([(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta])


def _shape_grad(xi, eta):
    # rows: shape function, cols: d/dxi, d/deta
    return np.array([
        [-(1 - eta), -(1 - xi)],
        [(1 - eta), -xi],
        [eta, xi],
        [-eta, (1 - xi)],
    ])


def q1_stiffness():
    K = np.zeros((4, 4))
    for xi, wx in zip(_GAUSS_1D, _GAUSS_W):
        for eta, wy in zip(_GAUSS_1D, _GAUSS_W):
            G = _shape_grad(xi, eta)
            K += wx * wy * (G @ G.T)
    return K


def q1_mass(h=1.0):
    M = np.zeros((4, 4))
    for xi, wx in zip(_GAUSS_1D, _GAUSS_W):
        for eta, wy in zip(_GAUSS_1D, _GAUSS_W):
            N = _shape(xi, eta)
            M += wx * wy * np.outer(N, N)
    return M * h * h


def gauss_points(order=2):
    # Points and weights on [0, 1] for tensor quadrature
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def shape_values(xi, eta):
    return _shape(xi, eta)


def shape_gradients(xi, eta):
    return _shape_grad(xi, eta)
