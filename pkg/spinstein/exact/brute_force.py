"""
Enumeration oracles on the full configuration space [q]^N of tiny graphs.
"""
import logging

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from ..errors import ResourceError, UsageError
from ..spin_core import Graph, ModelParams, conditional_spin_dist, edge_energy, proportions
from .lumped import LumpedMeasure, enumerate_states

logger = logging.getLogger(__name__)

MAX_CONFIGURATIONS = 10 ** 6


def enumerate_configurations(n_vertices: int, q: int) -> np.ndarray:
    """
    All q^N configurations; row i is the base-q expansion of i with vertex 0 as the least
    significant digit.
    """
    total = q ** n_vertices
    if total > MAX_CONFIGURATIONS:
        raise ResourceError(f"configuration space has {total} states, above the limit of {MAX_CONFIGURATIONS}", size=total)
    codes = np.arange(total, dtype=np.int64)
    return np.stack([(codes // q ** v) % q for v in range(n_vertices)], axis=1)


def configuration_index(config: np.ndarray, q: int) -> int:
    return int(np.sum(np.asarray(config, dtype=np.int64) * q ** np.arange(len(config), dtype=np.int64)))


class ConfigurationMeasure:
    """Gibbs measure on every configuration of a tiny graph."""

    def __init__(self, configs: np.ndarray, weights: np.ndarray, log_partition: float, q: int):
        self.configs = configs
        self.weights = weights
        self.log_partition = log_partition
        self.q = q

    def probability(self, config: np.ndarray) -> float:
        return float(self.weights[configuration_index(config, self.q)])

    def conditional(self, config: np.ndarray, v: int) -> np.ndarray:
        """Exact mu(sigma(v) = k | rest) by enumeration over the color of v."""
        masses = np.empty(self.q)
        for k in range(self.q):
            trial = np.array(config, dtype=np.int64)
            trial[v] = k
            masses[k] = self.probability(trial)
        return masses / masses.sum()

    def lumped(self) -> LumpedMeasure:
        """Push the measure to count vectors."""
        n_vertices = self.configs.shape[1]
        states = enumerate_states(n_vertices, self.q)
        index = {tuple(row): i for i, row in enumerate(states.tolist())}
        weights = np.zeros(states.shape[0])
        for config, w in zip(self.configs, self.weights):
            weights[index[tuple(proportions(config, self.q).tolist())]] += w
        return LumpedMeasure(states, weights, label="lumped configuration measure")


def brute_force_gibbs(g: Graph, p: ModelParams) -> ConfigurationMeasure:
    """Exact Gibbs measure exp(-beta H) / Z with Z kept in log space."""
    if p.n_vertices != g.n_vertices:
        raise UsageError("model size and graph size differ")
    configs = enumerate_configurations(g.n_vertices, p.q)
    log_w = np.array([2.0 * p.beta * edge_energy(g, c) / g.n_vertices for c in configs])
    log_z = float(logsumexp(log_w))
    return ConfigurationMeasure(configs, np.exp(log_w - log_z), log_z, p.q)


def product_measure(n_vertices: int, x: np.ndarray) -> ConfigurationMeasure:
    """i.i.d. colors with law x on every vertex."""
    x = np.asarray(x, dtype=float)
    configs = enumerate_configurations(n_vertices, x.size)
    weights = np.prod(x[configs], axis=1)
    return ConfigurationMeasure(configs, weights / weights.sum(), 0.0, x.size)


class ConfigurationChain:
    """Glauber dynamics on the full configuration space, with its Gibbs stationary law."""

    def __init__(self, transition: sp.csr_matrix, measure: ConfigurationMeasure):
        self.transition = transition
        self.measure = measure
        self.stationary = measure.weights
        self.states = measure.configs

    def detailed_balance_error(self) -> float:
        flow = sp.diags(self.stationary) @ self.transition
        return float(abs(flow - flow.T).max())


def configuration_chain(g: Graph, p: ModelParams) -> ConfigurationChain:
    """P(sigma -> sigma^{v,k}) = (1/N) mu_v(k | sigma) summed over vertices."""
    measure = brute_force_gibbs(g, p)
    configs = measure.configs
    n_vertices, q = g.n_vertices, p.q
    place = q ** np.arange(n_vertices, dtype=np.int64)
    rows, cols, vals = [], [], []
    for i, config in enumerate(configs):
        for v in range(n_vertices):
            probs = conditional_spin_dist(g, config, v, p) / n_vertices
            base = i - int(config[v]) * place[v]
            for k in range(q):
                rows.append(i)
                cols.append(base + k * place[v])
                vals.append(probs[k])
    size = configs.shape[0]
    transition = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    logger.info("Built configuration chain with %d states", size)
    return ConfigurationChain(transition, measure)
