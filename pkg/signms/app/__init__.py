from signms.app.experiment_config import ExperimentConfig, parse_config, parse_assignments, write_resolved
from signms.app.run_experiment import ExperimentResult, clear_reference_cache, run_experiment
from signms.app.verify import run_verification

__all__ = [
    "ExperimentConfig",
    "parse_config",
    "parse_assignments",
    "write_resolved",
    "ExperimentResult",
    "clear_reference_cache",
    "run_experiment",
    "run_verification",
]
