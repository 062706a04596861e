from .maximal import maximal_coupling_sample
from .contracting import (
    DEFAULT_GAMMA,
    CoupledState,
    CouplingTrace,
    contracting_pair_step,
    event_b_horizon,
    two_phase_coalescence,
)
from .tmix import CouplingBound, coupling_tmix_upper, hoeffding_margin, start_pairs, tail_quantile
from .graph_coupling import coupled_graph_step, one_step_expected_distance

__all__ = [
    "maximal_coupling_sample",
    "DEFAULT_GAMMA",
    "CoupledState",
    "CouplingTrace",
    "contracting_pair_step",
    "event_b_horizon",
    "two_phase_coalescence",
    "CouplingBound",
    "coupling_tmix_upper",
    "hoeffding_margin",
    "start_pairs",
    "tail_quantile",
    "coupled_graph_step",
    "one_step_expected_distance",
]
