# ====================================================
# Two-Scale Structured Mesh
# ----------------------------------------------------
# - Nested coarse (n_coarse^2) / fine (n_fine^2) grids
#   on the unit square
# - Row-major numbering of fine nodes, fine cells and
#   coarse elements
# - Dirichlet set = every fine node on the boundary
# ====================================================

from dataclasses import dataclass
from functools import cached_property
import logging

import numpy as np

from signms.errors import ConfigurationError

logger = logging.getLogger(__name__)


def rect_nodes(n_fine, ix0, ix1, iy0, iy1):
    """Global ids of the fine nodes in the inclusive box [ix0, ix1] x [iy0, iy1]."""
    if ix1 < ix0 or iy1 < iy0:
        return np.empty(0, dtype=np.int64)
    ix = np.arange(ix0, ix1 + 1, dtype=np.int64)
    iy = np.arange(iy0, iy1 + 1, dtype=np.int64)
    return (iy[:, None] * (n_fine + 1) + ix[None, :]).ravel()


@dataclass(frozen=True)
class TwoScaleMesh:
    n_fine: int
    n_coarse: int

    # =====================================================
    # SIZES
    # =====================================================
    @property
    def cells_per_coarse(self):
        return self.n_fine // self.n_coarse

    @property
    def H(self):
        return 1.0 / self.n_coarse

    @property
    def h(self):
        return 1.0 / self.n_fine

    @property
    def n_nodes(self):
        return (self.n_fine + 1) ** 2

    @property
    def n_cells(self):
        return self.n_fine ** 2

    @property
    def n_elements(self):
        return self.n_coarse ** 2

    # =====================================================
    # GEOMETRY
    # =====================================================
    @cached_property
    def node_coords(self):
        # (n_nodes, 2) array of (x, y)
        t = np.linspace(0.0, 1.0, self.n_fine + 1)
        xx, yy = np.meshgrid(t, t)
        return np.column_stack([xx.ravel(), yy.ravel()])

    @cached_property
    def cell_centers(self):
        t = (np.arange(self.n_fine) + 0.5) * self.h
        xx, yy = np.meshgrid(t, t)
        return np.column_stack([xx.ravel(), yy.ravel()])

    @cached_property
    def cell_nodes(self):
        # Local order: (0,0), (1,0), (1,1), (0,1) counter-clockwise
        n = self.n_fine
        cx, cy = np.meshgrid(np.arange(n), np.arange(n))
        base = (cy * (n + 1) + cx).ravel().astype(np.int64)
        return np.column_stack([base, base + 1, base + n + 2, base + n + 1])

    @cached_property
    def cell_to_element(self):
        c = self.cells_per_coarse
        cx, cy = np.meshgrid(np.arange(self.n_fine), np.arange(self.n_fine))
        return ((cy // c) * self.n_coarse + (cx // c)).ravel().astype(np.int64)

    # =====================================================
    # BOUNDARY
    # =====================================================
    @cached_property
    def dirichlet_dofs(self):
        n = self.n_fine
        ix = np.arange(self.n_nodes) % (n + 1)
        iy = np.arange(self.n_nodes) // (n + 1)
        on_boundary = (ix == 0) | (ix == n) | (iy == 0) | (iy == n)
        return np.flatnonzero(on_boundary).astype(np.int64)

    @cached_property
    def free_dofs(self):
        return rect_nodes(self.n_fine, 1, self.n_fine - 1, 1, self.n_fine - 1)

    # =====================================================
    # COARSE ELEMENTS
    # =====================================================
    def element_position(self, e):
        if not 0 <= e < self.n_elements:
            raise IndexError(f"coarse element {e} out of range [0, {self.n_elements})")
        return e % self.n_coarse, e // self.n_coarse

    def element_nodes(self, e):
        # Fine nodes of the closed element, row-major inside the element
        ex, ey = self.element_position(e)
        c = self.cells_per_coarse
        return rect_nodes(self.n_fine, ex * c, (ex + 1) * c, ey * c, (ey + 1) * c)

    def element_cells(self, e):
        ex, ey = self.element_position(e)
        c = self.cells_per_coarse
        cx = np.arange(ex * c, (ex + 1) * c)
        cy = np.arange(ey * c, (ey + 1) * c)
        return (cy[:, None] * self.n_fine + cx[None, :]).ravel().astype(np.int64)

    def cells_in_box(self, ex0, ex1, ey0, ey1):
        # Fine cells of the coarse-element box [ex0, ex1] x [ey0, ey1]
        c = self.cells_per_coarse
        cx = np.arange(ex0 * c, (ex1 + 1) * c)
        cy = np.arange(ey0 * c, (ey1 + 1) * c)
        return (cy[:, None] * self.n_fine + cx[None, :]).ravel().astype(np.int64)


# =====================================================
# BUILD MESH
# =====================================================
def build_mesh(n_fine, n_coarse):
    try:
        n_fine_int, n_coarse_int = int(n_fine), int(n_coarse)
    except (TypeError, ValueError):
        raise ConfigurationError(f"mesh sizes must be integers, got n_fine={n_fine!r}, n_coarse={n_coarse!r}")
    if n_fine_int != n_fine or n_coarse_int != n_coarse:
        raise ConfigurationError(f"mesh sizes must be integers, got n_fine={n_fine!r}, n_coarse={n_coarse!r}")

    if n_coarse_int < 1 or n_fine_int < n_coarse_int:
        raise ConfigurationError(
            f"need n_fine >= n_coarse >= 1, got n_fine={n_fine_int}, n_coarse={n_coarse_int}"
        )
    if n_fine_int % n_coarse_int != 0:
        raise ConfigurationError(
            f"n_coarse={n_coarse_int} does not divide n_fine={n_fine_int}"
        )

    mesh = TwoScaleMesh(n_fine_int, n_coarse_int)
    logger.debug(
        "mesh %dx%d fine / %dx%d coarse (%d cells per coarse side)",
        n_fine_int, n_fine_int, n_coarse_int, n_coarse_int, mesh.cells_per_coarse,
    )
    return mesh
