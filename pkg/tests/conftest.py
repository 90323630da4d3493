import numpy as np
import pytest

from signms.assembly import build_fine_operators
from signms.auxspace import build_auxiliary_space
from signms.coeffs import flat_interface, uniform_field
from signms.mesh import build_mesh


@pytest.fixture
def mesh_16_4():
    return build_mesh(16, 4)


@pytest.fixture
def uniform_16_4(mesh_16_4):
    return uniform_field(mesh_16_4, 1.0)


@pytest.fixture
def flat_mesh():
    return build_mesh(40, 8)


@pytest.fixture
def flat_field(flat_mesh):
    return flat_interface(flat_mesh)


@pytest.fixture
def flat_aux(flat_mesh, flat_field):
    return build_auxiliary_space(flat_mesh, flat_field, 3, n_jobs=1)


@pytest.fixture
def flat_ops(flat_mesh, flat_field):
    return build_fine_operators(flat_mesh, flat_field, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
