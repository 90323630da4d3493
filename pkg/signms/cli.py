# ====================================================
# Command-Line Interface
# ----------------------------------------------------
# - signms run     : one experiment from a config file
# - signms verify  : invariant / oracle suite
# - Exit code 0 only when every row / check passed
# ====================================================

import sys

import click

from signms.app import parse_assignments, parse_config, run_experiment, run_verification
from signms.app.logs import console, setup_logging
from signms.errors import SignmsError


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def cli(verbose):
    """Multiscale Helmholtz solver for sign-changing coefficients."""
    setup_logging("DEBUG" if verbose else None)


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="key=value experiment file.")
@click.option("--experiment", type=click.Choice(["flat_interface", "random_inclusions", "nim_slab", "custom"]))
@click.option("--out", "output_dir", type=click.Path(file_okay=False), help="Output folder.")
@click.option("--parallel", is_flag=True, default=None, help="Run (H, l*) groups concurrently.")
@click.option("--dump-fields", is_flag=True, default=None, help="Write u_ms, u_ref and |u_ms - u_ref| grids.")
@click.option("--set", "assignments", multiple=True, metavar="KEY=VALUE", help="Override any config key.")
@click.option("--quiet", "-q", is_flag=True, help="No progress bars or timing tables.")
def run(config_path, experiment, output_dir, parallel, dump_fields, assignments, quiet):
    """Run one experiment and write errors.csv / timings.csv."""
    try:
        overrides = parse_assignments(assignments)
        overrides.update(experiment=experiment, output_dir=output_dir, parallel=parallel, dump_fields=dump_fields)
        cfg = parse_config(config_path, overrides)
    except SignmsError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        sys.exit(2)

    result = run_experiment(cfg, quiet=quiet)
    for report in result.failed:
        console.print(f"[red]H={report.H:.4g} m={report.m} l*={report.l_star}:[/red] {report.error}")
    sys.exit(1 if result.failed else 0)


@cli.command()
def verify():
    """Run invariant and oracle checks on small meshes."""
    ok = run_verification()
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    cli()
