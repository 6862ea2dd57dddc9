"""Classical and quantum Cramer-Rao bounds for single-mode Gaussian phase
estimation: closed-form Fisher information, optimal Gaussian measurements,
a truncated Fock-basis oracle, and Monte-Carlo estimation experiments."""

from .states import (
    ChannelParams,
    GaussianMoments,
    InvalidStateError,
    StateParams,
    apply_phase_shift,
    apply_thermal_channel,
    apply_thermal_channel_moments,
    is_physical,
    mean_photon_number,
    moments_to_params,
    params_to_moments,
    reduce_angle,
    rotation_matrix,
)
from .measurement import (
    MeasurementKind,
    MeasurementSpec,
    OutcomeDistribution,
    UnsupportedKindError,
    outcome_distribution,
    s_to_transmittance,
    sample_outcomes,
    seed_covariance,
    transmittance_to_s,
)
from .fisher import (
    BoundReport,
    IllConditionedError,
    NoRealSolutionError,
    NumericFailureError,
    OptimalType,
    UndefinedTypeError,
    classify_optimal_type,
    closed_form_fi,
    critical_thermal_photon_number,
    gaussian_fi,
    numeric_fi_oracle,
    optimal_measurement_spec,
    optimize_gaussian_fi,
    qfi,
    qfi_turnaround_alpha,
    reduced_displacement,
    sql_threshold,
    type_boundaries,
)
from .fock import (
    CutoffExceededError,
    CutoffPolicy,
    DecompositionError,
    FockOperator,
    SpectralSLDReport,
    build_density_matrix,
    build_operators,
    converged_block,
    phase_derivative,
    povm_probability,
    qfi_from_sld,
    sld_closed_form,
    sld_quadratic_decomposition,
    sld_spectral,
    sld_spectral_convergence,
    svs_homodyne_optimality_check,
)
from .estimator import (
    EstimationReport,
    ExperimentConfig,
    log_likelihood,
    ml_estimate,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ChannelParams",
    "CutoffExceededError",
    "CutoffPolicy",
    "DecompositionError",
    "EstimationReport",
    "ExperimentConfig",
    "FockOperator",
    "GaussianMoments",
    "IllConditionedError",
    "InvalidStateError",
    "MeasurementKind",
    "MeasurementSpec",
    "NoRealSolutionError",
    "NumericFailureError",
    "OptimalType",
    "OutcomeDistribution",
    "SpectralSLDReport",
    "StateParams",
    "UndefinedTypeError",
    "UnsupportedKindError",
    "apply_phase_shift",
    "apply_thermal_channel",
    "apply_thermal_channel_moments",
    "build_density_matrix",
    "build_operators",
    "classify_optimal_type",
    "closed_form_fi",
    "converged_block",
    "critical_thermal_photon_number",
    "gaussian_fi",
    "is_physical",
    "log_likelihood",
    "mean_photon_number",
    "ml_estimate",
    "moments_to_params",
    "numeric_fi_oracle",
    "optimal_measurement_spec",
    "optimize_gaussian_fi",
    "outcome_distribution",
    "params_to_moments",
    "phase_derivative",
    "povm_probability",
    "qfi",
    "qfi_from_sld",
    "qfi_turnaround_alpha",
    "reduce_angle",
    "reduced_displacement",
    "rotation_matrix",
    "run_experiment",
    "s_to_transmittance",
    "sample_outcomes",
    "seed_covariance",
    "sld_closed_form",
    "sld_quadratic_decomposition",
    "sld_spectral",
    "sld_spectral_convergence",
    "sql_threshold",
    "svs_homodyne_optimality_check",
    "transmittance_to_s",
    "type_boundaries",
]
