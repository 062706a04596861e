from .state import (
    BOUNDARY_SLACK,
    ChainState,
    RestrictedRegion,
    StoppingTimes,
    nearest_counts,
    ball_extreme_counts,
)
from .glauber import (
    glauber_step,
    cwp_glauber_step,
    restricted_step,
    propose_cwp,
    propose_graph,
    moved_counts,
    cwp_update_distribution,
    cwp_move_probabilities,
    expected_increment,
)
from .trajectory import TrajectorySummary, run_trajectory, default_stride

__all__ = [
    "BOUNDARY_SLACK",
    "ChainState",
    "RestrictedRegion",
    "StoppingTimes",
    "nearest_counts",
    "ball_extreme_counts",
    "glauber_step",
    "cwp_glauber_step",
    "restricted_step",
    "propose_cwp",
    "propose_graph",
    "moved_counts",
    "cwp_update_distribution",
    "cwp_move_probabilities",
    "expected_increment",
    "TrajectorySummary",
    "run_trajectory",
    "default_stride",
]
