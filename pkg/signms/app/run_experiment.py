# ====================================================
# Experiment Runner
# ----------------------------------------------------
# - Walks the (H, l*, m) lattice of one experiment
# - Fine problem (field, source, reference solve) is
#   cached per fine-scale key and shared by every H
# - Each row: aux space -> basis -> coarse solve ->
#   errors; a failing row is recorded, the run goes on
# - Flat interface also gets Q1 baseline rows and
#   errors against the exact solution
# ====================================================

from dataclasses import dataclass, field as dc_field
from threading import Lock
import logging
import time

import numpy as np
from joblib import Parallel, delayed
from rich.console import Console
from threadpoolctl import threadpool_limits

from signms import config
from signms.app.experiment_config import write_resolved
from signms.app.export import dump_fields, write_tables
from signms.app.logs import log_row_timings
from signms.assembly import WeightMode, build_fine_operators, solve_reference
from signms.auxspace import build_auxiliary_space
from signms.coarse import (
    SolveReport,
    assemble_coarse_system,
    f_sinv_norm,
    relative_errors,
    resolution_ratio,
    solve_ms,
)
from signms.coeffs import (
    FlatInterfaceParams,
    contrast_ratio,
    flat_interface,
    flat_interface_nodal_solution,
    flat_interface_source,
    gaussian_source,
    load_field,
    load_source,
    nim_slab,
    random_inclusions,
)
from signms.errors import SignmsError
from signms.mesh import build_mesh
from signms.msbasis import build_multiscale_basis, decay_profile

console = Console()
logger = logging.getLogger(__name__)

# Fine problems shared across coarse sizes and runs
reference_cache = {}
cache_lock = Lock()


@dataclass(eq=False)
class FineProblem:
    field: object
    source: object
    operators: object
    load: np.ndarray
    u_ref: np.ndarray
    upsilon: float
    u_exact: np.ndarray | None = None
    seconds: dict = dc_field(default_factory=dict)


@dataclass
class ExperimentResult:
    config: object
    reports: list
    paths: dict
    decay_rows: list = dc_field(default_factory=list)

    @property
    def failed(self):
        return [r for r in self.reports if r.status != "ok"]


def clear_reference_cache():
    with cache_lock:
        reference_cache.clear()


# =====================================================
# FIELDS AND SOURCES
# =====================================================
def flat_params(cfg):
    return FlatInterfaceParams(cfg.sigma_plus, cfg.sigma_minus, cfg.gamma, cfg.k)


def build_field(cfg, mesh):
    if cfg.experiment == "flat_interface":
        return flat_interface(mesh, cfg.sigma_plus, cfg.sigma_minus, cfg.gamma)
    if cfg.experiment == "random_inclusions":
        return random_inclusions(
            mesh, seed=cfg.seed, contrast=tuple(cfg.contrast),
            count=cfg.inclusion_count, size_range=tuple(cfg.inclusion_size),
        )
    if cfg.experiment == "nim_slab":
        return nim_slab(mesh, sigma_plus=cfg.sigma_plus, sigma_minus_mag=cfg.sigma_minus)
    return load_field(cfg.sigma_path, cfg.c_path or None, n_fine=mesh.n_fine)


def build_source(cfg, mesh):
    if cfg.experiment == "flat_interface":
        return flat_interface_source(mesh, flat_params(cfg))
    if cfg.experiment == "nim_slab":
        # Beam form: no normalization prefactor
        return gaussian_source(mesh, tuple(cfg.source_center), cfg.source_spread, normalized=False)
    if cfg.experiment == "custom" and cfg.f_path:
        return load_source(cfg.f_path, mesh)
    return gaussian_source(mesh, tuple(cfg.source_center), cfg.source_spread, normalized=True)


def _cache_key(cfg):
    # Everything that changes the fine problem but not H, m or l*
    shape = (
        cfg.sigma_plus, cfg.sigma_minus, cfg.gamma, tuple(cfg.contrast), cfg.inclusion_count,
        tuple(cfg.inclusion_size), tuple(cfg.source_center), cfg.source_spread,
        cfg.sigma_path, cfg.c_path, cfg.f_path,
    )
    return (cfg.experiment, cfg.n_fine, cfg.k, cfg.seed, shape)


def fine_problem(cfg, mesh, quiet=True):
    key = _cache_key(cfg)
    with cache_lock:
        cached = reference_cache.get(key)
    if cached is not None:
        logger.info("reference cache hit for %s n_fine=%d k=%g seed=%d", cfg.experiment, cfg.n_fine, cfg.k, cfg.seed)
        return cached

    start = time.time()
    field = build_field(cfg, mesh)
    source = build_source(cfg, mesh)
    field_seconds = time.time() - start

    start = time.time()
    ops = build_fine_operators(mesh, field, cfg.k)
    u_ref = solve_reference(mesh, field, cfg.k, source, operators=ops, quiet=quiet)
    reference_seconds = time.time() - start

    u_exact = None
    if cfg.experiment == "flat_interface":
        u_exact = flat_interface_nodal_solution(mesh, flat_params(cfg))

    problem = FineProblem(
        field=field,
        source=source,
        operators=ops,
        load=ops.load(source),
        u_ref=u_ref,
        upsilon=contrast_ratio(field),
        u_exact=u_exact,
        seconds={"field": field_seconds, "reference": reference_seconds},
    )
    with cache_lock:
        reference_cache[key] = problem
    return problem


# =====================================================
# Q1 BASELINE  (plain Q1 on the coarse grid itself)
# =====================================================
def q1_baseline(cfg, n_coarse, quiet=True):
    report = SolveReport(
        experiment=cfg.experiment, method="q1", H=1.0 / n_coarse, m=0, l_star=0,
        k=cfg.k, n_fine=n_coarse, seed=cfg.seed,
    )
    start = time.time()
    try:
        mesh = build_mesh(n_coarse, 1)
        params = flat_params(cfg)
        field = flat_interface(mesh, cfg.sigma_plus, cfg.sigma_minus, cfg.gamma)
        u_h = solve_reference(mesh, field, cfg.k, flat_interface_source(mesh, params), quiet=quiet)
        exact = flat_interface_nodal_solution(mesh, params)
        e_a, e_l2 = relative_errors(exact, u_h, field)
        report.energy_rel = report.energy_rel_exact = e_a
        report.l2_rel = report.l2_rel_exact = e_l2
        report.upsilon = contrast_ratio(field)
    except SignmsError as e:
        logger.error("Q1 baseline at H=1/%d failed: %s", n_coarse, e)
        report.failed(e)
    report.timings = {"reference": time.time() - start}
    return report


# =====================================================
# ONE COARSE SIZE AND ONE l*
# =====================================================
def _decay_rows(cfg, mesh, problem, aux, weight):
    rng = np.random.default_rng(cfg.seed)
    elements = rng.choice(mesh.n_elements, size=min(cfg.decay_samples, mesh.n_elements), replace=False)
    rows, thetas = [], []
    m_max = min(cfg.decay_m_max, mesh.n_coarse)
    for i in sorted(int(e) for e in elements):
        j = int(rng.integers(aux.l_star))
        try:
            profile = decay_profile(mesh, problem.field, aux, cfg.k, i, j, m_max, weight, problem.operators)
        except SignmsError as e:
            logger.warning("decay profile for (i=%d, j=%d) failed: %s", i, j, e)
            continue
        if profile.theta is not None:
            thetas.append(profile.theta)
        for m, diff, tail in profile.rows():
            rows.append({
                "H": mesh.H, "l_star": aux.l_star, "element": i, "index": j, "m": m,
                "difference_energy": diff, "tail_energy": tail,
                "theta": np.nan if profile.theta is None else profile.theta,
            })
    return rows, (float(np.median(thetas)) if thetas else float("nan"))


def run_group(cfg, n_coarse, l_star, problem, n_jobs=None, quiet=True):
    mesh = build_mesh(cfg.n_fine, n_coarse)
    weight = WeightMode(cfg.correction_weight)
    base = dict(
        experiment=cfg.experiment, method="cem", H=mesh.H, l_star=l_star,
        k=cfg.k, n_fine=cfg.n_fine, seed=cfg.seed, upsilon=problem.upsilon,
    )
    shared = dict(problem.seconds)

    start = time.time()
    try:
        aux = build_auxiliary_space(mesh, problem.field, l_star, cfg.mu_msh, n_jobs=n_jobs, quiet=quiet)
    except SignmsError as e:
        logger.error("auxiliary space at H=1/%d, l*=%d failed: %s", n_coarse, l_star, e)
        return [SolveReport(m=m, **base).failed(e) for m in cfg.m], []
    shared["aux"] = time.time() - start

    lam = aux.lambda_gap
    rho = resolution_ratio(cfg.k, mesh.H, lam, cfg.mu_msh)
    f_norm = f_sinv_norm(problem.source, problem.field, mesh, cfg.mu_msh)

    decay_rows, theta = [], float("nan")
    if cfg.decay_samples > 0:
        start = time.time()
        decay_rows, theta = _decay_rows(cfg, mesh, problem, aux, weight)
        shared["decay"] = time.time() - start

    ops = problem.operators
    reports = []
    for m in cfg.m:
        report = SolveReport(m=m, lambda_gap=lam, rho=rho, f_sinv_norm=f_norm, decay_rate=theta, **base)
        timings = dict(shared)
        try:
            start = time.time()
            basis = build_multiscale_basis(ops, aux, m, weight, n_jobs=n_jobs, quiet=quiet)
            timings["basis"] = time.time() - start

            start = time.time()
            u_ms = solve_ms(assemble_coarse_system(basis, ops.helmholtz, problem.load), basis)
            timings["coarse"] = time.time() - start

            start = time.time()
            report.energy_rel, report.l2_rel = relative_errors(
                problem.u_ref, u_ms, problem.field, ops.stiffness_abs, ops.mass_plain
            )
            if problem.u_exact is not None:
                report.energy_rel_exact, report.l2_rel_exact = relative_errors(
                    problem.u_exact, u_ms, problem.field, ops.stiffness_abs, ops.mass_plain
                )
            timings["errors"] = time.time() - start

            if cfg.dump_fields:
                tag = f"H{n_coarse}_m{m}_l{l_star}"
                dump_fields(cfg.output_dir, tag, mesh, u_ms, problem.u_ref, problem.field, basis, cfg.dump_basis)
        except SignmsError as e:
            logger.error("row H=1/%d m=%d l*=%d failed: %s", n_coarse, m, l_star, e)
            report.failed(e)

        report.flag_resolution(cfg.resolution_threshold)
        report.timings = timings
        reports.append(report)
        log_row_timings(
            f"H = 1/{n_coarse}    m = {m}    l* = {l_star}    status: {report.status}",
            timings, cfg.output_dir, quiet=quiet,
        )
    return reports, decay_rows


# =====================================================
# WHOLE EXPERIMENT
# =====================================================
def run_experiment(cfg, quiet=False):
    run_start = time.time()
    console.print(f"\n[bold magenta]========== EXPERIMENT: {cfg.experiment.upper()} ==========[/bold magenta]")
    console.print(
        f"n_fine: [green]{cfg.n_fine}[/green]  H: [green]{', '.join(f'1/{n}' for n in cfg.n_coarse)}[/green]  "
        f"m: [green]{list(cfg.m)}[/green]  l*: [green]{list(cfg.l_star_values)}[/green]  k: [green]{cfg.k:g}[/green]"
    )
    write_resolved(cfg, cfg.output_dir)

    reports, decay_rows = [], []
    try:
        problem = fine_problem(cfg, build_mesh(cfg.n_fine, cfg.n_coarse[0]), quiet=quiet)
    except SignmsError as e:
        logger.error("fine problem failed: %s", e)
        reports = [
            SolveReport(experiment=cfg.experiment, method="cem", H=1.0 / nc, m=m, l_star=l,
                        k=cfg.k, n_fine=cfg.n_fine, seed=cfg.seed).failed(e)
            for nc in cfg.n_coarse for l in cfg.l_star_values for m in cfg.m
        ]
        paths = write_tables(reports, cfg.output_dir)
        return ExperimentResult(cfg, reports, paths)

    groups = [(nc, l) for nc in cfg.n_coarse for l in cfg.l_star_values]
    if cfg.parallel and len(groups) > 1:
        # Groups are the only level of threads; BLAS is pinned once for all of them
        workers = min(len(groups), config.worker_count())
        runner = Parallel(n_jobs=workers, prefer="threads")
        with threadpool_limits(limits=1):
            results = runner(delayed(run_group)(cfg, nc, l, problem, 1, True) for nc, l in groups)
    else:
        results = [run_group(cfg, nc, l, problem, quiet=quiet) for nc, l in groups]
    for group_reports, group_decay in results:
        reports.extend(group_reports)
        decay_rows.extend(group_decay)

    if cfg.experiment == "flat_interface" and cfg.q1_baseline:
        reports.extend(q1_baseline(cfg, nc, quiet=quiet) for nc in cfg.n_coarse)

    paths = write_tables(reports, cfg.output_dir, decay_rows)
    result = ExperimentResult(cfg, reports, paths, decay_rows)

    elapsed = round(time.time() - run_start, 2)
    if result.failed:
        console.print(f"[red]{len(result.failed)} of {len(reports)} rows failed[/red]")
    else:
        console.print(f"[green]All {len(reports)} rows completed.[/green]")
    console.print(f"[cyan]Tables written to {cfg.output_dir}[/cyan] (took {elapsed} seconds)")
    return result
