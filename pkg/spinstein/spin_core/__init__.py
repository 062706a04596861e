# Export the shared model types, observables and the update kernel
from .model import (
    ModelParams,
    Graph,
    as_configuration,
    from_one_based,
    to_one_based,
    check_prob_vector,
    uniform_vector,
)
from .observables import (
    hamming,
    proportions,
    neighbor_proportions,
    edge_energy,
    complete_graph_energy,
    tv_distance,
)
from .kernels import softmax_gbeta, conditional_spin_dist, hamiltonian, log_gibbs_weight
from .streams import make_stream, sample_categorical
from .graph_io import (
    build_graph,
    complete_graph,
    cycle_graph,
    path_graph,
    empty_graph,
    random_regular_graph,
    erdos_renyi_graph,
    read_graph,
    write_graph,
    read_configuration,
    write_configuration,
)

__all__ = [
    "ModelParams",
    "Graph",
    "as_configuration",
    "from_one_based",
    "to_one_based",
    "check_prob_vector",
    "uniform_vector",
    "hamming",
    "proportions",
    "neighbor_proportions",
    "edge_energy",
    "complete_graph_energy",
    "tv_distance",
    "softmax_gbeta",
    "conditional_spin_dist",
    "hamiltonian",
    "log_gibbs_weight",
    "make_stream",
    "sample_categorical",
    "build_graph",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "empty_graph",
    "random_regular_graph",
    "erdos_renyi_graph",
    "read_graph",
    "write_graph",
    "read_configuration",
    "write_configuration",
]
