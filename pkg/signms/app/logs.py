# ====================================================
# Logging and Stage Timings for signms runs
# ----------------------------------------------------
# - One RichHandler for the whole process
# - Prints how long each stage of a row took
#   (fields, aux space, basis, coarse, reference, errors)
# - Appends the same table to logs/run_profiling.log
# ====================================================

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

from signms import config

console = Console()

STAGE_LABELS = {
    "field": "Coefficient field",
    "reference": "Reference solve",
    "aux": "Auxiliary space",
    "basis": "Basis (patch solves)",
    "coarse": "Coarse solve",
    "errors": "Error measures",
    "decay": "Decay profile",
}


def setup_logging(level=None):
    level = (level or config.LOG_LEVEL).upper()
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_path=False)],
        force=True,
    )
    return logging.getLogger("signms")


def _timing_lines(timings):
    lines = [f"{STAGE_LABELS.get(stage, stage):<22} {seconds:>8.2f}s" for stage, seconds in timings.items()]
    lines.append(f"{'Total Duration':<22} {sum(timings.values()):>8.2f}s")
    return lines


def log_row_timings(header, timings, out_dir, quiet=False):
    lines = _timing_lines(timings)
    if not quiet:
        console.print("\n[bold magenta]" + "=" * 50 + "[/bold magenta]")
        console.print(header)
        console.print("[bold magenta]" + "-" * 50 + "[/bold magenta]")
        for line in lines:
            console.print(line)
        console.print("[bold magenta]" + "-" * 50 + "[/bold magenta]")

    log_dir = os.path.join(out_dir, "logs")
    os.makedirs(log_dir, exist_ok=True)
    with open(os.path.join(log_dir, "run_profiling.log"), "a", encoding="utf-8") as f:
        f.write(f"\n{'=' * 50}\n{header}\n{'-' * 50}\n" + "\n".join(lines) + f"\n{'=' * 50}")
