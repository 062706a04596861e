"""
Coupled heat-bath updates on a general graph.
"""
import numpy as np

from ..dynamics import ChainState
from ..spin_core import Graph, ModelParams, conditional_spin_dist, hamming, tv_distance
from .maximal import maximal_coupling_sample


def coupled_graph_step(g: Graph, w: ChainState, z: ChainState, p: ModelParams, rng: np.random.Generator) -> int:
    """
    Update the same uniform vertex in both chains with maximally coupled colors.

    Returns:
        the change in Hamming distance (-1, 0 or +1)
    """
    v = int(rng.integers(w.n_vertices))
    before = int(w.config[v] != z.config[v])
    i, j = maximal_coupling_sample(
        conditional_spin_dist(g, w.config, v, p), conditional_spin_dist(g, z.config, v, p), rng
    )
    w.recolor(v, i)
    z.recolor(v, j)
    w.step += 1
    z.step += 1
    return int(w.config[v] != z.config[v]) - before


def one_step_expected_distance(g: Graph, sigma: np.ndarray, tau: np.ndarray, p: ModelParams) -> float:
    """
    Exact E[d_H] after one coupled step from (sigma, tau).

    With v uniform, vertex v disagrees afterwards with probability TV of the two conditional
    laws at v, and every other vertex keeps its current status.
    """
    n = g.n_vertices
    distance = hamming(sigma, tau)
    total = 0.0
    for v in range(n):
        disagreement = tv_distance(conditional_spin_dist(g, sigma, v, p), conditional_spin_dist(g, tau, v, p))
        total += distance - int(sigma[v] != tau[v]) + disagreement
    return total / n
