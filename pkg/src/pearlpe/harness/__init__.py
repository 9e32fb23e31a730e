"""Executable checks of encoder properties: equivariance, sample size, stability,
cycle counting and input-moment identities."""

from .cycles import cycle_count_oracle, triangle_config, triangle_estimator
from .equivariance import equivariance_error, loglog_slope, r_pearl_slope_experiment
from .moments import moment_input_identity_check, second_moment_identity
from .report import ExperimentReport
from .sample_complexity import prescribed_samples, sample_complexity_experiment
from .stability import (Perturbation, PerturbationSpec, pe_distance, perturb,
                        spectral_norm_estimate, stability_bound, stability_experiment)

__all__ = [
    "ExperimentReport",
    "Perturbation",
    "PerturbationSpec",
    "cycle_count_oracle",
    "equivariance_error",
    "loglog_slope",
    "moment_input_identity_check",
    "pe_distance",
    "perturb",
    "prescribed_samples",
    "r_pearl_slope_experiment",
    "sample_complexity_experiment",
    "second_moment_identity",
    "spectral_norm_estimate",
    "stability_bound",
    "stability_experiment",
    "triangle_config",
    "triangle_estimator",
]
