# ====================================================
# Oversampled Patches K_i^m
# ----------------------------------------------------
# - Grows a coarse element by m layers (Chebyshev
#   distance on the coarse grid), clipped to the domain
# - Resolves all fine dofs of the closed patch and the
#   interior dofs carrying zero trace on the patch border
# ====================================================

from dataclasses import dataclass
from functools import cached_property

from signms.errors import ConfigurationError
from signms.mesh.two_scale import TwoScaleMesh, rect_nodes


@dataclass(frozen=True, eq=False)
class Patch:
    mesh: TwoScaleMesh
    center_element: int
    layers: int
    # Inclusive coarse-element box (ex0, ex1, ey0, ey1)
    box: tuple

    @cached_property
    def element_set(self):
        ex0, ex1, ey0, ey1 = self.box
        nc = self.mesh.n_coarse
        return tuple(ey * nc + ex for ey in range(ey0, ey1 + 1) for ex in range(ex0, ex1 + 1))

    @property
    def fine_box(self):
        ex0, ex1, ey0, ey1 = self.box
        c = self.mesh.cells_per_coarse
        return ex0 * c, (ex1 + 1) * c, ey0 * c, (ey1 + 1) * c

    @cached_property
    def all_dofs(self):
        ix0, ix1, iy0, iy1 = self.fine_box
        return rect_nodes(self.mesh.n_fine, ix0, ix1, iy0, iy1)

    @cached_property
    def interior_dofs(self):
        # Box border covers both the patch boundary and any part of the
        # domain boundary the patch touches
        ix0, ix1, iy0, iy1 = self.fine_box
        return rect_nodes(self.mesh.n_fine, ix0 + 1, ix1 - 1, iy0 + 1, iy1 - 1)

    @cached_property
    def cells(self):
        return self.mesh.cells_in_box(*self.box)

    @property
    def is_saturated(self):
        return len(self.element_set) == self.mesh.n_elements

    def __contains__(self, element):
        ex0, ex1, ey0, ey1 = self.box
        ex, ey = element % self.mesh.n_coarse, element // self.mesh.n_coarse
        return ex0 <= ex <= ex1 and ey0 <= ey <= ey1


def oversample_patch(mesh, i, m):
    if not 0 <= i < mesh.n_elements:
        raise IndexError(f"coarse element {i} out of range [0, {mesh.n_elements})")
    if m < 0:
        raise ConfigurationError(f"oversampling layers must be >= 0, got m={m}")

    nc = mesh.n_coarse
    ex, ey = i % nc, i // nc
    box = (max(0, ex - m), min(nc - 1, ex + m), max(0, ey - m), min(nc - 1, ey + m))
    return Patch(mesh, int(i), int(m), box)
