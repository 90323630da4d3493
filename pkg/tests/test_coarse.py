import numpy as np
import pytest
import scipy.sparse as sparse

from signms.assembly import build_fine_operators, solve_reference
from signms.auxspace import build_auxiliary_space
from signms.coarse import (
    SolveReport,
    assemble_coarse_system,
    energy_norm,
    f_sinv_norm,
    l2_norm,
    quadrature_errors,
    relative_errors,
    resolution_ratio,
    solve_ms,
)
from signms.coarse.galerkin import solve_coarse
from signms.coeffs import SourceField, flat_interface, gaussian_source, uniform_field
from signms.errors import DomainError, SignmsError, SolverError
from signms.mesh import build_mesh
from signms.msbasis import build_multiscale_basis


@pytest.fixture
def flat_system(flat_mesh, flat_field, flat_aux, flat_ops):
    basis = build_multiscale_basis(flat_ops, flat_aux, m=2, n_jobs=1)
    load = flat_ops.load(gaussian_source(flat_mesh))
    return basis, load


# =====================================================
# COARSE SYSTEM
# =====================================================
def test_single_element_system():
    mesh = build_mesh(8, 1)
    field = uniform_field(mesh)
    ops = build_fine_operators(mesh, field, 1.0)
    aux = build_auxiliary_space(mesh, field, 1, n_jobs=1)
    basis = build_multiscale_basis(ops, aux, m=0, n_jobs=1)
    load = ops.load(gaussian_source(mesh))
    K, F = assemble_coarse_system(basis, ops.helmholtz, load)
    phi = basis.column(0, 0)
    assert K.shape == (1, 1)
    assert K[0, 0] == pytest.approx(phi @ (ops.helmholtz @ phi))
    assert F[0] == pytest.approx(phi @ load)


def test_coarse_matrix_symmetric_and_banded(flat_mesh, flat_ops, flat_system):
    basis, load = flat_system
    K, F = assemble_coarse_system(basis, flat_ops.helmholtz, load)
    assert K.shape == (basis.n_columns, basis.n_columns)
    assert abs(K - K.T).max() <= 1e-10 * abs(K).max()
    assert F.shape == (basis.n_columns,)
    # Elements 0 and 63 sit 7 layers apart: m=2 patches do not overlap
    l = basis.l_star
    assert not np.any(K[0:l, 63 * l:64 * l].toarray())


def test_dimension_mismatch(flat_ops, flat_system):
    basis, load = flat_system
    with pytest.raises(SignmsError):
        assemble_coarse_system(basis, flat_ops.helmholtz, load[:-1])


def test_zero_source_gives_zero_solution(flat_ops, flat_system):
    basis, load = flat_system
    u = solve_ms(assemble_coarse_system(basis, flat_ops.helmholtz, np.zeros_like(load)), basis)
    assert not np.any(u)


def test_galerkin_orthogonality(flat_mesh, flat_field, flat_ops, flat_system):
    basis, load = flat_system
    u_ms = solve_ms(assemble_coarse_system(basis, flat_ops.helmholtz, load), basis)
    source = gaussian_source(flat_mesh)
    u_ref = solve_reference(flat_mesh, flat_field, 4.0, source, operators=flat_ops)
    Phi = basis.matrix
    residual = Phi.T @ (flat_ops.helmholtz @ (u_ref - u_ms))
    assert np.abs(residual).max() <= 1e-8 * np.abs(Phi.T @ load).max()


def test_singular_coarse_matrix_suggests_remedy():
    K = sparse.csr_matrix(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SolverError, match="l_star"):
        solve_coarse(K, np.array([1.0, 0.0]))


def test_sparse_path_matches_dense(monkeypatch, flat_ops, flat_system):
    basis, load = flat_system
    system = assemble_coarse_system(basis, flat_ops.helmholtz, load)
    dense = solve_ms(system, basis)
    monkeypatch.setattr("signms.config.DENSE_COARSE_LIMIT", 0)
    assert np.allclose(solve_ms(system, basis), dense, rtol=1e-9, atol=1e-14)


# =====================================================
# NORMS
# =====================================================
def test_norms_of_zero_and_identical():
    mesh = build_mesh(8, 2)
    field = flat_interface(mesh)
    v = np.zeros(mesh.n_nodes)
    assert energy_norm(v, field) == 0.0
    assert l2_norm(v) == 0.0
    u = np.sin(np.pi * mesh.node_coords[:, 0])
    assert relative_errors(u, u, field) == (0.0, 0.0)


def test_energy_norm_of_linear_function():
    mesh = build_mesh(10, 2)
    x = mesh.node_coords[:, 0]
    assert energy_norm(x, uniform_field(mesh)) == pytest.approx(1.0)
    assert l2_norm(np.ones(mesh.n_nodes)) == pytest.approx(1.0)


def test_zero_reference_rejected():
    mesh = build_mesh(8, 2)
    with pytest.raises(DomainError):
        relative_errors(np.zeros(mesh.n_nodes), np.ones(mesh.n_nodes), uniform_field(mesh))


def test_f_sinv_norm():
    mesh = build_mesh(40, 20)
    field = uniform_field(mesh)
    ones = SourceField(np.ones(mesh.n_nodes))
    assert f_sinv_norm(SourceField(np.zeros(mesh.n_nodes)), field, mesh) == 0.0
    assert f_sinv_norm(ones, field, mesh) == pytest.approx(np.sqrt(1.0 / (24.0 * 400.0)))
    coarser = build_mesh(40, 10)
    assert f_sinv_norm(ones, field, mesh) == pytest.approx(0.5 * f_sinv_norm(ones, field, coarser))


def test_quadrature_errors_of_exact_interpolant():
    # Bilinear functions are reproduced exactly by Q1
    mesh = build_mesh(8, 1)
    x, y = mesh.node_coords.T
    e_l2, e_a, norm_l2, norm_a = quadrature_errors(
        mesh, x * y, lambda a, b: a * b, lambda a, b: (b, a)
    )
    assert e_l2 < 1e-14 and e_a < 1e-14
    assert norm_l2 == pytest.approx(1.0 / 3.0)
    assert norm_a == pytest.approx(np.sqrt(2.0 / 3.0))


# =====================================================
# DIAGNOSTICS
# =====================================================
def test_resolution_ratio():
    rho = resolution_ratio(4.0, 1 / 20, 1.0, 24.0)
    assert rho == pytest.approx(16.0 / (400.0 * 24.0))
    assert resolution_ratio(8.0, 1 / 20, 1.0) == pytest.approx(4 * rho)
    assert resolution_ratio(4.0, 1 / 40, 1.0) == pytest.approx(rho / 4)


def test_report_rows_keep_timings_apart():
    report = SolveReport(experiment="flat_interface", method="cem", H=0.05, m=2, l_star=3, k=4.0, n_fine=400)
    report.rho = 2.0
    report.timings = {"basis": 1.23456}
    report.flag_resolution()
    row = report.as_row()
    assert row["rho_flagged"] is True
    assert "timings" not in row and "lambda" in row
    assert report.timing_row()["seconds_basis"] == 1.235
    report.failed(SolverError("boom\nsecond line"))
    assert report.status == "failed" and "\n" not in report.error
