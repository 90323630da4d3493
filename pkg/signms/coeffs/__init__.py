from signms.coeffs.fields import CoefficientField, SourceField, contrast_ratio
from signms.coeffs.profiles import flat_interface, random_inclusions, nim_slab, uniform_field
from signms.coeffs.sources import (
    FlatInterfaceParams,
    flat_interface_exact,
    flat_interface_source,
    flat_interface_nodal_solution,
    gaussian_source,
    nodal_source,
)
from signms.coeffs.grid_io import (
    load_field,
    save_field,
    read_grid,
    write_grid,
    save_node_field,
    load_source,
)

__all__ = [
    "CoefficientField",
    "SourceField",
    "contrast_ratio",
    "flat_interface",
    "random_inclusions",
    "nim_slab",
    "uniform_field",
    "FlatInterfaceParams",
    "flat_interface_exact",
    "flat_interface_source",
    "flat_interface_nodal_solution",
    "gaussian_source",
    "nodal_source",
    "load_field",
    "save_field",
    "read_grid",
    "write_grid",
    "save_node_field",
    "load_source",
]
