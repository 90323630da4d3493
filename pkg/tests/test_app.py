import importlib
import math

import pandas as pd
import pytest
from click.testing import CliRunner

from signms.app import clear_reference_cache, parse_assignments, parse_config, run_experiment, write_resolved
from signms.app.experiment_config import format_value, read_config_file
from signms.app.export import format_number
from signms.cli import cli
from signms.errors import ConfigurationError, SolverError

runner_module = importlib.import_module("signms.app.run_experiment")
space_module = importlib.import_module("signms.auxspace.space")
basis_module = importlib.import_module("signms.msbasis.local_basis")


@pytest.fixture(autouse=True)
def fresh_cache():
    clear_reference_cache()
    yield
    clear_reference_cache()


def _write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def _tiny(tmp_path, experiment="flat_interface", **extra):
    overrides = dict(
        experiment=experiment, n_fine=24, n_coarse=[4, 6], m=[1, 2], l_star=2,
        output_dir=str(tmp_path / "out"),
    )
    overrides.update(extra)
    return parse_config(None, overrides)


# =====================================================
# CONFIG PARSING
# =====================================================
def test_empty_file_gives_defaults(tmp_path):
    cfg = parse_config(_write(tmp_path, ""), {"experiment": "flat_interface"})
    assert cfg.n_fine == 400
    assert cfg.n_coarse == (20, 40, 80)
    assert cfg.m == (1, 2, 3, 4)
    assert cfg.l_star == 3
    assert cfg.k == 4.0
    assert cfg.mu_msh == 24.0
    assert cfg.correction_weight == "signed"


def test_nim_slab_default_wavenumber():
    cfg = parse_config(None, {"experiment": "nim_slab"})
    assert cfg.k == pytest.approx(2 * math.pi ** 2)
    assert cfg.sigma_minus == 10.0
    assert cfg.source_center == (0.0, 0.5)


def test_flag_beats_file_and_is_echoed(tmp_path):
    path = _write(tmp_path, "experiment=flat_interface\nk=6\nn_coarse=[20,40]\n")
    cfg = parse_config(path, {"k": "8", "output_dir": str(tmp_path / "out")})
    assert cfg.k == 8.0
    assert cfg.provenance["k"] == "flag"
    assert cfg.provenance["n_coarse"] == "file"
    assert cfg.provenance["mu_msh"] == "default"

    with open(write_resolved(cfg, tmp_path / "out"), encoding="utf-8") as f:
        text = f.read()
    assert "k=8.0  # flag" in text
    assert "n_coarse=[20,40]  # file" in text


def test_unknown_keys_are_listed(tmp_path):
    path = _write(tmp_path, "experiment=flat_interface\nwavenumber=4\ncoarse=[2]\n")
    with pytest.raises(ConfigurationError, match="coarse, wavenumber"):
        read_config_file(path)


@pytest.mark.parametrize("line, key", [("n_fine=4x", "n_fine"), ("m=1,2", "m"), ("dump_fields=maybe", "dump_fields")])
def test_type_mismatch_names_key(tmp_path, line, key):
    with pytest.raises(ConfigurationError, match=f"'{key}' expects"):
        parse_config(_write(tmp_path, line + "\n"))


def test_non_divisible_coarse_size_rejected_before_solving():
    with pytest.raises(ConfigurationError, match="n_coarse=3"):
        parse_config(None, {"n_fine": 400, "n_coarse": [3]})


@pytest.mark.parametrize("overrides", [{"k": -1.0}, {"l_star": 0}, {"m": [-1]}, {"experiment": "custom"}])
def test_invalid_values(overrides):
    with pytest.raises(ConfigurationError):
        parse_config(None, overrides)


def test_assignment_parsing():
    assert parse_assignments(["k=8", "m=[1,2]"]) == {"k": "8", "m": "[1,2]"}
    with pytest.raises(ConfigurationError):
        parse_assignments(["k"])


def test_format_helpers():
    assert format_value((1, 2, 3)) == "[1,2,3]"
    assert format_value(((0, 1), (5, 2))) == "[0:1,5:2]"
    assert format_number(0.0026041) == "2.604e-03"
    assert format_number(float("nan")) == "nan"


# =====================================================
# RUNNER
# =====================================================
def test_flat_interface_run_writes_tables(tmp_path):
    cfg = _tiny(tmp_path)
    result = run_experiment(cfg, quiet=True)
    assert not result.failed

    errors = pd.read_csv(result.paths["errors"], dtype=str)
    assert len(errors) == 2 * 2 + 2  # (H, m) lattice plus Q1 rows
    assert set(errors["method"]) == {"cem", "q1"}
    cem = errors[errors["method"] == "cem"]
    assert all(float(v) >= 0 for v in cem["energy_rel"])
    assert all(float(v) > 0 for v in cem["lambda"])
    assert "seconds_basis" not in errors.columns
    assert "seconds_basis" in pd.read_csv(result.paths["timings"]).columns
    assert (tmp_path / "out" / "config_resolved.txt").exists()
    assert (tmp_path / "out" / "logs" / "run_profiling.log").exists()


def test_identical_configs_give_identical_csv(tmp_path):
    first = run_experiment(_tiny(tmp_path, "random_inclusions", inclusion_count=5, inclusion_size=[2, 4], output_dir=str(tmp_path / "a")), quiet=True)
    clear_reference_cache()
    second = run_experiment(_tiny(tmp_path, "random_inclusions", inclusion_count=5, inclusion_size=[2, 4], output_dir=str(tmp_path / "b")), quiet=True)
    with open(first.paths["errors"], "rb") as a, open(second.paths["errors"], "rb") as b:
        assert a.read() == b.read()


def test_reference_cache_hit_matches_miss(tmp_path):
    cold = run_experiment(_tiny(tmp_path, "nim_slab", output_dir=str(tmp_path / "cold")), quiet=True)
    assert len(runner_module.reference_cache) == 1
    warm = run_experiment(_tiny(tmp_path, "nim_slab", output_dir=str(tmp_path / "warm")), quiet=True)
    assert len(runner_module.reference_cache) == 1
    with open(cold.paths["errors"], "rb") as a, open(warm.paths["errors"], "rb") as b:
        assert a.read() == b.read()


def test_parallel_rows_match_sequential(tmp_path):
    seq = run_experiment(_tiny(tmp_path, output_dir=str(tmp_path / "seq"), q1_baseline=False), quiet=True)
    par = run_experiment(_tiny(tmp_path, output_dir=str(tmp_path / "par"), q1_baseline=False, parallel=True), quiet=True)
    a = pd.read_csv(seq.paths["errors"], dtype=str)
    b = pd.read_csv(par.paths["errors"], dtype=str)
    pd.testing.assert_frame_equal(a, b)


def test_parallel_groups_pin_blas_once(tmp_path, monkeypatch):
    entered = []
    real = runner_module.threadpool_limits

    def counting(where):
        def limits(*args, **kwargs):
            entered.append(where)
            return real(*args, **kwargs)
        return limits

    monkeypatch.setattr(runner_module, "threadpool_limits", counting("groups"))
    monkeypatch.setattr(space_module, "threadpool_limits", counting("eigen"))
    monkeypatch.setattr(basis_module, "threadpool_limits", counting("patches"))
    result = run_experiment(_tiny(tmp_path, q1_baseline=False, parallel=True), quiet=True)
    assert not result.failed
    assert entered == ["groups"]


def test_failing_rows_are_recorded(tmp_path, monkeypatch):
    real = runner_module.build_multiscale_basis

    def flaky(ops, aux, m, *args, **kwargs):
        if m == 2:
            raise SolverError("patch system is numerically singular")
        return real(ops, aux, m, *args, **kwargs)

    monkeypatch.setattr(runner_module, "build_multiscale_basis", flaky)
    result = run_experiment(_tiny(tmp_path, q1_baseline=False), quiet=True)
    assert len(result.failed) == 2
    assert all(r.m == 2 for r in result.failed)
    errors = pd.read_csv(result.paths["errors"], dtype=str)
    assert sorted(errors["status"]) == ["failed", "failed", "ok", "ok"]


def test_field_dumps_and_decay(tmp_path):
    cfg = _tiny(tmp_path, n_coarse=[4], m=[1], dump_fields=True, dump_basis=[(5, 0)], decay_samples=2, decay_m_max=2)
    result = run_experiment(cfg, quiet=True)
    folder = tmp_path / "out" / "fields"
    assert (folder / "u_ms_H4_m1_l2.txt").exists()
    assert (folder / "abs_error_H4_m1_l2.txt").exists()
    assert (folder / "phi_5_0_H4_m1_l2.txt").exists()
    decay = pd.read_csv(result.paths["decay"])
    assert set(decay["m"]) == {1, 2}


def test_l_star_sweep(tmp_path):
    cfg = _tiny(tmp_path, n_coarse=[4], m=[1], l_star_list=[1, 2, 3], q1_baseline=False)
    result = run_experiment(cfg, quiet=True)
    assert sorted(r.l_star for r in result.reports) == [1, 2, 3]


# =====================================================
# CLI
# =====================================================
def test_cli_run_and_exit_code(tmp_path):
    path = _write(tmp_path, "experiment=flat_interface\nn_fine=12\nn_coarse=[3]\nm=[1]\nl_star=1\n")
    out = tmp_path / "cli_out"
    result = CliRunner().invoke(cli, ["run", "--config", str(path), "--out", str(out), "--quiet", "--set", "k=2"])
    assert result.exit_code == 0, result.output
    assert (out / "errors.csv").exists()
    assert "k=2.0  # flag" in (out / "config_resolved.txt").read_text(encoding="utf-8")


def test_cli_bad_config_exit_code(tmp_path):
    path = _write(tmp_path, "n_fine=400\nn_coarse=[3]\n")
    result = CliRunner().invoke(cli, ["run", "--config", str(path), "--out", str(tmp_path / "x")])
    assert result.exit_code == 2
    assert "n_coarse=3" in result.output
