# =====================================================
# signms: run all three experiments
# ======================================================
# Runs the experiment configs in configs/ one after
# another and writes each table under results/<name>/:
#
# 1. Flat interface (exact solution, Q1 baseline rows)
# 2. Random inclusions (seeded layout)
# 3. Negative-index slab
# =====================================================

import os
import sys

from signms.app import parse_config, run_experiment
from signms.app.logs import console, setup_logging

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")
EXPERIMENTS = ["flat_interface", "random_inclusions", "nim_slab"]


def main():
    setup_logging()
    failed = 0
    for step, name in enumerate(EXPERIMENTS, start=1):
        console.print("\n========================================")
        console.print(f"{step}. Running {name}...")
        console.print("========================================")
        cfg = parse_config(os.path.join(CONFIG_DIR, f"{name}.cfg"))
        failed += len(run_experiment(cfg).failed)

    console.print("\n========================================")
    console.print("All steps completed." if not failed else f"{failed} row(s) failed.")
    console.print("========================================")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
