# ====================================================
# Full-size runs on the 400x400 fine grid
# - pytest -m slow
# ====================================================

import math

import numpy as np
import pytest

from signms.app import clear_reference_cache, parse_config, run_experiment
from signms.auxspace import build_auxiliary_space
from signms.coeffs import flat_interface
from signms.mesh import build_mesh
from signms.msbasis import decay_profile

pytestmark = pytest.mark.slow


def _rows(result):
    return {(r.method, round(1 / r.H), r.m): r for r in result.reports if r.status == "ok"}


def _run(tmp_path, **overrides):
    clear_reference_cache()
    overrides.setdefault("output_dir", str(tmp_path / overrides["experiment"]))
    return run_experiment(parse_config(None, overrides), quiet=True)


def test_flat_interface_errors(tmp_path):
    result = _run(tmp_path, experiment="flat_interface", n_fine=400, n_coarse=[20, 40, 80], m=[2, 3, 4], l_star=3, k=4)
    assert not result.failed
    rows = _rows(result)
    assert rows[("cem", 20, 4)].energy_rel <= 1.1e-3
    assert rows[("cem", 40, 3)].l2_rel <= 2.7e-4
    for n in (20, 40, 80):
        assert rows[("cem", n, 4)].energy_rel <= rows[("cem", n, 2)].energy_rel


def test_random_inclusions_drop(tmp_path):
    result = _run(tmp_path, experiment="random_inclusions", n_fine=400, n_coarse=[80], m=[1, 3], contrast=[1.0, 1.0e3])
    rows = _rows(result)
    fine, coarse = rows[("cem", 80, 3)].energy_rel, rows[("cem", 80, 1)].energy_rel
    assert fine <= 0.05
    assert fine / coarse <= 0.05


def test_nim_slab_improves_with_layers(tmp_path):
    result = _run(tmp_path, experiment="nim_slab", n_fine=400, n_coarse=[40], m=[1, 3], k=2 * math.pi ** 2)
    rows = _rows(result)
    assert rows[("cem", 40, 3)].energy_rel <= 1.2e-2
    assert rows[("cem", 40, 1)].energy_rel >= 20 * rows[("cem", 40, 3)].energy_rel


def test_decay_on_flat_interface():
    mesh = build_mesh(400, 20)
    field = flat_interface(mesh, 1.0, 3.0, 0.5)
    aux = build_auxiliary_space(mesh, field, 3)
    rng = np.random.default_rng(0)
    for i in rng.choice(mesh.n_elements, size=10, replace=False):
        j = int(rng.integers(3))
        profile = decay_profile(mesh, field, aux, 4.0, int(i), j, 4)
        assert profile.theta is not None and profile.theta < 1
        assert all(b < a for a, b in zip(profile.tail_energy, profile.tail_energy[1:]))


def test_identical_runs_are_byte_identical(tmp_path):
    paths = []
    for name in ("first", "second"):
        result = _run(
            tmp_path, experiment="random_inclusions", n_fine=400, n_coarse=[20], m=[1, 2],
            output_dir=str(tmp_path / name),
        )
        paths.append(result.paths["errors"])
    with open(paths[0], "rb") as a, open(paths[1], "rb") as b:
        assert a.read() == b.read()
