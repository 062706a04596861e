from .bounds import (
    LipschitzSpec,
    BoundReport,
    TNormEstimate,
    contraction_rate_bounded_degree,
    bounded_degree_bound,
    mean_T_norm,
    meanfield_residual,
    influence_bound,
    tmix_upper_bound_bounded_degree,
    exact_expectation_gap,
)
from .experiments import (
    ExperimentTable,
    CltReport,
    clt_covariance_check,
    wasserstein_scaling,
    theta_star_trend,
    restricted_tmix_scaling,
    coalescence_tail,
    concentration_run,
    contraction_envelope,
    displaced_configuration,
)

__all__ = [
    "LipschitzSpec",
    "BoundReport",
    "TNormEstimate",
    "contraction_rate_bounded_degree",
    "bounded_degree_bound",
    "mean_T_norm",
    "meanfield_residual",
    "influence_bound",
    "tmix_upper_bound_bounded_degree",
    "exact_expectation_gap",
    "ExperimentTable",
    "CltReport",
    "clt_covariance_check",
    "wasserstein_scaling",
    "theta_star_trend",
    "restricted_tmix_scaling",
    "coalescence_tail",
    "concentration_run",
    "contraction_envelope",
    "displaced_configuration",
]
