from signms.mesh.two_scale import TwoScaleMesh, build_mesh, rect_nodes
from signms.mesh.patches import Patch, oversample_patch

__all__ = ["TwoScaleMesh", "build_mesh", "rect_nodes", "Patch", "oversample_patch"]
