"""
Single-site Glauber updates: general graphs, the O(q) complete-graph (CWP) step, and the
restricted step that rejects proposals leaving an l2 ball of proportions.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import UsageError
from ..spin_core import Graph, ModelParams, conditional_spin_dist, sample_categorical, softmax_gbeta
from .state import ChainState, RestrictedRegion

logger = logging.getLogger(__name__)


def cwp_update_distribution(counts: np.ndarray, color: int, beta: float) -> np.ndarray:
    """g_beta(S - e_color / N): the recoloring law of a vertex currently colored `color`."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    s = counts / n
    s[color] -= 1.0 / n
    return softmax_gbeta(s, beta)


def cwp_move_probabilities(counts: np.ndarray, beta: float) -> np.ndarray:
    """
    Joint law of (current color, new color) of the updated vertex in the complete-graph chain.

    Returns:
        q x q matrix P with P[k, l] = s_k g_beta^(l)(s - e_k / N); the entries sum to 1 and
        the trace is the probability that the count vector does not change
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = float(counts.sum())
    moves = np.zeros((counts.size, counts.size))
    for k in np.flatnonzero(counts):
        moves[k] = (counts[k] / n) * cwp_update_distribution(counts, int(k), beta)
    return moves


def expected_increment(counts: np.ndarray, beta: float) -> np.ndarray:
    """Exact E[S_{t+1} - S_t | S_t] of the complete-graph chain."""
    counts = np.asarray(counts, dtype=np.int64)
    n = float(counts.sum())
    moves = cwp_move_probabilities(counts, beta)
    np.fill_diagonal(moves, 0.0)
    return (moves.sum(axis=0) - moves.sum(axis=1)) / n


def glauber_step(g: Graph, state: ChainState, p: ModelParams, rng: np.random.Generator) -> ChainState:
    """
    One heat-bath update on a general graph: a uniform vertex takes a color drawn from
    g_beta(S_v). Mutates and returns state.
    """
    v, color = propose_graph(g, state, p, rng)
    state.recolor(v, color)
    state.step += 1
    return state


def propose_graph(g: Graph, state: ChainState, p: ModelParams, rng: np.random.Generator) -> Tuple[int, int]:
    v = int(rng.integers(state.n_vertices))
    return v, sample_categorical(conditional_spin_dist(g, state.config, v, p), rng)


def propose_cwp(state: ChainState, p: ModelParams, rng: np.random.Generator) -> Tuple[int, int]:
    v = int(rng.integers(state.n_vertices))
    probs = cwp_update_distribution(state.counts, int(state.config[v]), p.beta)
    return v, sample_categorical(probs, rng)


def cwp_glauber_step(state: ChainState, p: ModelParams, rng: np.random.Generator) -> ChainState:
    """Complete-graph update in O(q) using the maintained counts. Mutates and returns state."""
    v, color = propose_cwp(state, p, rng)
    state.recolor(v, color)
    state.step += 1
    return state


def moved_counts(counts: np.ndarray, old: int, new: int) -> np.ndarray:
    moved = counts.copy()
    moved[old] -= 1
    moved[new] += 1
    return moved


def restricted_step(
    state: ChainState,
    region: RestrictedRegion,
    p: ModelParams,
    rng: np.random.Generator,
    graph: Optional[Graph] = None,
) -> Tuple[ChainState, bool]:
    """
    Restricted Glauber update.

    The proposal comes from the complete-graph step, or from the general-graph step when
    graph is given; a proposal whose proportions leave the ball is rejected and the chain
    stays put.

    Returns:
        (state, rejected)
    """
    if not region.contains_counts(state.counts):
        raise UsageError(f"restricted chain is outside {region!r} at t={state.step}")
    if graph is None:
        v, color = propose_cwp(state, p, rng)
    else:
        v, color = propose_graph(graph, state, p, rng)
    old = int(state.config[v])
    rejected = False
    if old != color:
        if region.contains_counts(moved_counts(state.counts, old, color)):
            state.recolor(v, color)
        else:
            rejected = True
    state.step += 1
    return state, rejected
