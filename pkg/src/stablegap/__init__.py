"""Simulation and verification toolkit for the Wasserstein gap between
SDEs driven by alpha-stable noise and their Brownian counterparts."""

from .config import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_D_GRID,
    DEFAULT_SWEEP_SAMPLES,
    ExperimentConfig,
    config_from_mapping,
    load_config,
    parse_config_text,
)
from .errors import CapacityError, DomainError, IntegrationError, InvariantError
from .experiments import (
    AlphaSweepResult,
    ContractionResult,
    DimSweepResult,
    GradientCheckResult,
    RateFit,
    SelfTestResult,
    TransientResult,
    derive_stream,
    fit_rate,
    load_results,
    parallel_map,
    run_alpha_sweep,
    run_contraction,
    run_dim_sweep,
    run_gradient_check,
    run_selftest,
    run_transient,
    worker_count,
    write_csv,
)
from .ou import (
    OuStationaryLaw,
    gammalower_check,
    ou_stationary_sample,
    ou_transient_char,
    ou_w1_lower_exact,
)
from .rng import RngStream, as_generator
from .sampling import (
    CharFunctionEstimate,
    StableModel,
    empirical_char_function,
    sample_gaussian_increment,
    sample_stable_increment,
    sample_subordinator_increment,
)
from .sde import (
    DriftSpec,
    SdePath,
    VariationalPath,
    ergodic_sample,
    integrate,
    integrate_coupled,
    integrate_coupled_ensemble,
    integrate_ensemble,
    variational_flow,
)
from .specfun import (
    DimConstants,
    crate_bound_fit,
    dim_constants,
    gaussian_mean_norm,
    j11_prefactor,
    log_gamma,
    mean_norm_prefactor,
    phi,
    ratio_minus_one,
    sphere_surface,
    stable_intensity_constant,
    stable_mean_norm,
    subordinator_neg_moment,
)
from .wasserstein import (
    ASSIGNMENT_CAP,
    EmpiricalMeasure,
    W1Estimate,
    bootstrap_stderr,
    w1_assignment,
    w1_exact_1d,
    w1_mean_norm_lower,
    w1_sliced,
)

__version__ = "0.1.0"

__all__ = [
    "ASSIGNMENT_CAP",
    "AlphaSweepResult",
    "CapacityError",
    "CharFunctionEstimate",
    "ContractionResult",
    "DEFAULT_ALPHA_GRID",
    "DEFAULT_D_GRID",
    "DEFAULT_SWEEP_SAMPLES",
    "DimConstants",
    "DimSweepResult",
    "DomainError",
    "DriftSpec",
    "EmpiricalMeasure",
    "ExperimentConfig",
    "GradientCheckResult",
    "IntegrationError",
    "InvariantError",
    "OuStationaryLaw",
    "RateFit",
    "RngStream",
    "SdePath",
    "SelfTestResult",
    "StableModel",
    "TransientResult",
    "VariationalPath",
    "W1Estimate",
    "as_generator",
    "bootstrap_stderr",
    "config_from_mapping",
    "crate_bound_fit",
    "derive_stream",
    "dim_constants",
    "empirical_char_function",
    "ergodic_sample",
    "fit_rate",
    "gammalower_check",
    "gaussian_mean_norm",
    "integrate",
    "integrate_coupled",
    "integrate_coupled_ensemble",
    "integrate_ensemble",
    "j11_prefactor",
    "load_config",
    "load_results",
    "log_gamma",
    "mean_norm_prefactor",
    "ou_stationary_sample",
    "ou_transient_char",
    "ou_w1_lower_exact",
    "parallel_map",
    "parse_config_text",
    "phi",
    "ratio_minus_one",
    "run_alpha_sweep",
    "run_contraction",
    "run_dim_sweep",
    "run_gradient_check",
    "run_selftest",
    "run_transient",
    "sample_gaussian_increment",
    "sample_stable_increment",
    "sample_subordinator_increment",
    "sphere_surface",
    "stable_intensity_constant",
    "stable_mean_norm",
    "subordinator_neg_moment",
    "variational_flow",
    "w1_assignment",
    "w1_exact_1d",
    "w1_mean_norm_lower",
    "w1_sliced",
    "worker_count",
    "write_csv",
]
