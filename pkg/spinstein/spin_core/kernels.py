"""
The single-site update kernel shared by every dynamics.

Hamiltonian convention: H(sigma) = -(2/N) * (number of monochromatic edges). With this
convention the Gibbs conditional at a vertex equals softmax(2 beta S_v(sigma)) exactly.
"""
import numpy as np

from .model import Graph, ModelParams
from .observables import edge_energy, neighbor_proportions


def softmax_gbeta(s: np.ndarray, beta: float) -> np.ndarray:
    """
    g_beta(s)^(k) = exp(2 beta s_k) / sum_j exp(2 beta s_j).

    Computed with max-subtraction, so beta up to 1e3 does not overflow and the result is
    invariant under adding a constant to every entry of s.
    """
    z = 2.0 * beta * np.asarray(s, dtype=float)
    z = z - z.max()
    w = np.exp(z)
    return w / w.sum()


def conditional_spin_dist(g: Graph, config: np.ndarray, v: int, p: ModelParams) -> np.ndarray:
    """Conditional color distribution mu_v(. | config) = g_beta(S_v(config))."""
    return softmax_gbeta(neighbor_proportions(g, config, v, p.q), p.beta)


def hamiltonian(g: Graph, config: np.ndarray) -> float:
    """H(config) = -(2/N) * monochromatic edge count."""
    return -2.0 * edge_energy(g, config) / g.n_vertices


def log_gibbs_weight(g: Graph, config: np.ndarray, p: ModelParams) -> float:
    """Unnormalised log Gibbs weight -beta H(config)."""
    return -p.beta * hamiltonian(g, config)
