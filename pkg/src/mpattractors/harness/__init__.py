from mpattractors.harness.config import ExperimentConfig, load_config, rng_for, validate
from mpattractors.harness.experiments import REGISTRY, clear_solution_cache, list_experiments
from mpattractors.harness.plotdata import emit_profile_plotdata, loglinear_fit
from mpattractors.harness.runner import RunReport, run_experiment

__all__ = [
    "REGISTRY",
    "ExperimentConfig",
    "RunReport",
    "clear_solution_cache",
    "emit_profile_plotdata",
    "list_experiments",
    "load_config",
    "loglinear_fit",
    "rng_for",
    "run_experiment",
    "validate",
]
