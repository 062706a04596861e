from .lumped import (
    MAX_STATES,
    LumpedChain,
    LumpedMeasure,
    state_count,
    enumerate_states,
    log_multinomial,
    gibbs_log_weights,
    lumped_gibbs,
    lumped_gibbs_exp_form,
    conditional_multinomial,
    lumped_transition_matrix,
    solve_stationary,
    write_coordinate_text,
)
from .mixing import MixingResult, tv_curve_and_tmix, tv_from_start, worst_tv
from .stein import SteinSolution, solve_stein_poisson, stein_series, neighbour_lipschitz
from .transport import (
    TransportResult,
    solve_lumped_transport,
    exact_wasserstein_exchangeable,
    point_mass,
    configuration_wasserstein,
)
from .brute_force import (
    ConfigurationMeasure,
    ConfigurationChain,
    enumerate_configurations,
    configuration_index,
    brute_force_gibbs,
    product_measure,
    configuration_chain,
)

__all__ = [
    "MAX_STATES",
    "LumpedChain",
    "LumpedMeasure",
    "state_count",
    "enumerate_states",
    "log_multinomial",
    "gibbs_log_weights",
    "lumped_gibbs",
    "lumped_gibbs_exp_form",
    "conditional_multinomial",
    "lumped_transition_matrix",
    "solve_stationary",
    "write_coordinate_text",
    "MixingResult",
    "tv_curve_and_tmix",
    "tv_from_start",
    "worst_tv",
    "SteinSolution",
    "solve_stein_poisson",
    "stein_series",
    "neighbour_lipschitz",
    "TransportResult",
    "solve_lumped_transport",
    "exact_wasserstein_exchangeable",
    "point_mass",
    "configuration_wasserstein",
    "ConfigurationMeasure",
    "ConfigurationChain",
    "enumerate_configurations",
    "configuration_index",
    "brute_force_gibbs",
    "product_measure",
    "configuration_chain",
]
