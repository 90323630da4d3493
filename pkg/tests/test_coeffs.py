import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from signms.coeffs import (
    CoefficientField,
    FlatInterfaceParams,
    SourceField,
    contrast_ratio,
    flat_interface,
    flat_interface_exact,
    gaussian_source,
    load_field,
    load_source,
    nim_slab,
    random_inclusions,
    read_grid,
    save_field,
    save_node_field,
    uniform_field,
    write_grid,
)
from signms.errors import ConfigurationError, DomainError, GenerationError, IngestionError
from signms.mesh import build_mesh


def _cell_at(mesh, x, y):
    return int(y * mesh.n_fine) * mesh.n_fine + int(x * mesh.n_fine)


# =====================================================
# FIELD INVARIANTS
# =====================================================
def test_field_rejects_zero_and_sign_mismatch():
    with pytest.raises(ConfigurationError):
        CoefficientField(np.array([1.0, 0.0, 1.0, 1.0]), np.ones(4))
    with pytest.raises(ConfigurationError):
        CoefficientField(np.array([1.0, -1.0, 1.0, 1.0]), np.ones(4))
    with pytest.raises(ConfigurationError):
        CoefficientField(np.ones(3), np.ones(3))


def test_source_rejects_non_finite():
    with pytest.raises(ConfigurationError):
        SourceField(np.array([0.0, np.nan]))


# =====================================================
# FLAT INTERFACE
# =====================================================
def test_flat_interface_values():
    mesh = build_mesh(400, 20)
    field = flat_interface(mesh)
    assert field.sigma[_cell_at(mesh, 0.5, 0.75)] == 1.0
    assert field.sigma[_cell_at(mesh, 0.5, 0.25)] == -3.0
    assert field.negative.sum() == mesh.n_cells // 2
    assert np.array_equal(field.sigma, field.c)


def test_flat_interface_symmetric_contrast():
    field = flat_interface(build_mesh(20, 4), sigma_plus=1.0, sigma_minus_mag=1.0)
    assert np.all(np.abs(field.sigma) == 1.0)


@pytest.mark.parametrize("kwargs", [{"sigma_plus": 0.0}, {"sigma_minus_mag": -3.0}, {"gamma": 1.0}])
def test_flat_interface_rejects_bad_parameters(kwargs):
    with pytest.raises(ConfigurationError):
        flat_interface(build_mesh(20, 4), **kwargs)


def test_exact_solution_vanishes_on_boundary_and_interface():
    params = FlatInterfaceParams()
    t = np.linspace(0.0, 1.0, 21)
    for x, y in ((t, 0 * t), (t, 0 * t + 1), (0 * t, t), (0 * t + 1, t), (t, 0 * t + params.gamma)):
        u, _ = flat_interface_exact((x, y), params)
        assert np.allclose(u, 0.0, atol=1e-15)


def test_exact_solution_scalar_point():
    u, f = flat_interface_exact((0.3, 0.8))
    assert isinstance(u, float) and isinstance(f, float)


def test_exact_source_matches_pde_residual():
    # -div(sigma grad u) - k^2 c u = f by central differences, away from y = gamma
    params = FlatInterfaceParams(k=4.0)
    rng = np.random.default_rng(3)
    x = rng.uniform(0.05, 0.95, 50)
    y = np.concatenate([rng.uniform(0.05, 0.45, 25), rng.uniform(0.55, 0.95, 25)])
    sigma = np.where(y > params.gamma, params.sigma_plus, -params.sigma_minus_mag)

    h = 5e-3

    def u(a, b):
        return flat_interface_exact((a, b), params)[0]

    lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)) / h ** 2
    residual = -sigma * lap - params.k ** 2 * sigma * u(x, y)
    _, f = flat_interface_exact((x, y), params)
    # Cubic in each variable: the 5-point stencil is exact up to rounding
    assert np.abs(residual - f).max() < 1e-6 * max(1.0, np.abs(f).max())


# =====================================================
# RANDOM INCLUSIONS
# =====================================================
def test_no_inclusions_is_uniform():
    field = random_inclusions(build_mesh(40, 4), count=0)
    assert np.all(field.sigma == 1.0)


def test_single_inclusion_cell_count():
    field = random_inclusions(build_mesh(400, 20), seed=7, count=1, size_range=(4, 4))
    assert field.negative.sum() == 16


def test_inclusions_do_not_touch_boundary():
    mesh = build_mesh(60, 6)
    grid = random_inclusions(mesh, seed=11, count=30, size_range=(2, 8)).sigma.reshape(60, 60)
    border = np.concatenate([grid[0], grid[-1], grid[:, 0], grid[:, -1]])
    assert np.all(border > 0)


def test_inclusions_that_cannot_fit():
    with pytest.raises(GenerationError):
        random_inclusions(build_mesh(8, 2), count=1, size_range=(9, 12))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(0, 10))
def test_inclusions_are_deterministic(seed, count):
    mesh = build_mesh(40, 4)
    a = random_inclusions(mesh, seed=seed, count=count, size_range=(2, 6))
    b = random_inclusions(mesh, seed=seed, count=count, size_range=(2, 6))
    assert np.array_equal(a.sigma, b.sigma)
    assert np.array_equal(np.sign(a.sigma), np.sign(a.c))
    assert set(np.unique(a.sigma)) <= {1.0, -1.0e3}


# =====================================================
# NIM SLAB
# =====================================================
def test_nim_slab_values():
    mesh = build_mesh(400, 20)
    field = nim_slab(mesh)
    assert field.sigma[_cell_at(mesh, 0.5, 0.3)] == -10.0
    assert field.sigma[_cell_at(mesh, 0.1, 0.3)] == 1.0


def test_nim_slab_aligned_cell_count():
    mesh = build_mesh(408, 24)
    assert nim_slab(mesh).negative.sum() == 408 * 34


# =====================================================
# SOURCES AND CONTRAST
# =====================================================
def test_gaussian_center_values():
    mesh = build_mesh(20, 4)
    center = 10 * 21 + 10
    normalized = gaussian_source(mesh, (0.5, 0.5), 0.05, normalized=True)
    plain = gaussian_source(mesh, (0.5, 0.5), 0.05, normalized=False)
    assert normalized.f[center] == pytest.approx(1.0 / (0.05 * np.sqrt(2 * np.pi)))
    assert plain.f[center] == pytest.approx(1.0)


def test_beam_source_value():
    mesh = build_mesh(20, 4)
    node = 10 * 21 + 2  # (0.1, 0.5)
    beam = gaussian_source(mesh, (0.0, 0.5), 0.05, normalized=False)
    assert beam.f[node] == pytest.approx(np.exp(-2.0))


def test_gaussian_decays_with_radius():
    mesh = build_mesh(20, 4)
    row = gaussian_source(mesh, (0.5, 0.5), 0.1).f.reshape(21, 21)[10, 10:]
    assert np.all(np.diff(row) < 0)


def test_gaussian_rejects_bad_spread():
    with pytest.raises(ConfigurationError):
        gaussian_source(build_mesh(4, 1), spread=0.0)


def test_contrast_ratios():
    mesh = build_mesh(40, 4)
    assert contrast_ratio(flat_interface(mesh)) == pytest.approx(1 / 3)
    assert contrast_ratio(random_inclusions(mesh, count=3, size_range=(2, 4))) == pytest.approx(1e-3)
    assert contrast_ratio(uniform_field(mesh)) == np.inf
    with pytest.raises(DomainError):
        contrast_ratio(uniform_field(mesh, -2.0))


# =====================================================
# GRID FILES
# =====================================================
def test_field_save_load_identity(tmp_path):
    mesh = build_mesh(48, 4)
    field = nim_slab(mesh)
    save_field(field, tmp_path / "sigma.txt", tmp_path / "c.txt")
    loaded = load_field(tmp_path / "sigma.txt", tmp_path / "c.txt", n_fine=48)
    assert np.array_equal(loaded.sigma, field.sigma)
    assert np.array_equal(loaded.c, field.c)


def test_load_rejects_zero_entry(tmp_path):
    values = np.ones((4, 4))
    values[2, 1] = 0.0
    write_grid(tmp_path / "sigma.txt", values)
    with pytest.raises(IngestionError) as err:
        load_field(tmp_path / "sigma.txt")
    assert err.value.line == 4


def test_zero_entry_line_counts_blank_lines(tmp_path):
    path = tmp_path / "sigma.txt"
    path.write_text("2 2\n\n1.0 1.0\n1.0 0.0\n", encoding="utf-8")
    with pytest.raises(IngestionError, match="column 2") as err:
        load_field(path)
    assert err.value.line == 4


def test_load_rejects_short_file(tmp_path):
    path = tmp_path / "sigma.txt"
    path.write_text("3 3\n1 1 1\n1 1 1\n1 1\n", encoding="utf-8")
    with pytest.raises(IngestionError, match="count mismatch") as err:
        read_grid(path)
    assert err.value.line == 4


def test_load_rejects_unparsable_token(tmp_path):
    path = tmp_path / "sigma.txt"
    path.write_text("2 2\n1 1\n1 abc\n", encoding="utf-8")
    with pytest.raises(IngestionError, match="abc") as err:
        read_grid(path)
    assert err.value.line == 3


def test_load_rejects_wrong_size(tmp_path):
    write_grid(tmp_path / "sigma.txt", np.ones((4, 4)))
    with pytest.raises(IngestionError):
        load_field(tmp_path / "sigma.txt", n_fine=8)


def test_node_field_round_trip(tmp_path):
    mesh = build_mesh(8, 2)
    values = np.linspace(-1.0, 1.0, mesh.n_nodes)
    save_node_field(tmp_path / "f.txt", mesh, values)
    assert np.array_equal(load_source(tmp_path / "f.txt", mesh).f, values)
