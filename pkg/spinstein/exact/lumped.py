"""
The lumped (count-vector) chain of the complete-graph dynamics and the measures on it.

States are ordered colexicographically. Weights are built in log space with gammaln so
N up to a few hundred is handled exactly.
"""
import logging
from math import comb
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.special import gammaln, logsumexp

from ..dynamics import RestrictedRegion, cwp_move_probabilities
from ..errors import OutputError, ResourceError, SolverError, UsageError

logger = logging.getLogger(__name__)

MAX_STATES = 10 ** 7
STATIONARY_TOL = 1e-10


def state_count(n_vertices: int, q: int) -> int:
    """C(N + q - 1, q - 1)."""
    return comb(n_vertices + q - 1, q - 1)


def _compositions(n_vertices: int, q: int) -> np.ndarray:
    """All count vectors summing to N, one per row, in colexicographic order."""
    if q == 1:
        return np.array([[n_vertices]], dtype=np.int64)
    rows = []
    for last in range(n_vertices + 1):
        head = _compositions(n_vertices - last, q - 1)
        rows.append(np.hstack([head, np.full((head.shape[0], 1), last, dtype=np.int64)]))
    return np.vstack(rows)


def enumerate_states(n_vertices: int, q: int, region: Optional[RestrictedRegion] = None) -> np.ndarray:
    """
    Feasible count vectors, optionally restricted to an l2 ball of proportions.

    Raises:
        ResourceError when C(N + q - 1, q - 1) exceeds 10^7
    """
    total = state_count(n_vertices, q)
    if total > MAX_STATES:
        raise ResourceError(f"lumped state space has {total} states, above the limit of {MAX_STATES}", size=total)
    states = _compositions(n_vertices, q)
    if region is not None:
        keep = np.fromiter((region.contains_counts(row) for row in states), dtype=bool, count=len(states))
        states = states[keep]
        if states.shape[0] == 0:
            raise UsageError(f"{region!r} contains no count vector for N={n_vertices}")
    return states


def log_multinomial(states: np.ndarray) -> np.ndarray:
    n = states.sum(axis=1)
    return gammaln(n + 1.0) - gammaln(states + 1.0).sum(axis=1)


class LumpedMeasure:
    """A probability measure over the states of a lumped chain."""

    def __init__(self, states: np.ndarray, weights: np.ndarray, label: str = "", captured_mass: float = 1.0):
        weights = np.asarray(weights, dtype=float)
        if weights.shape[0] != states.shape[0]:
            raise UsageError("measure weights and states differ in length")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise UsageError(f"measure '{label}' is not normalised")
        self.states = states
        self.weights = weights
        self.label = label
        self.captured_mass = captured_mass

    @property
    def n_vertices(self) -> int:
        return int(self.states[0].sum())

    @property
    def q(self) -> int:
        return int(self.states.shape[1])

    def mean_proportions(self) -> np.ndarray:
        return self.weights @ self.states / float(self.n_vertices)

    def expectation(self, values: np.ndarray) -> float:
        return float(self.weights @ np.asarray(values, dtype=float))

    def __repr__(self) -> str:
        return f"LumpedMeasure('{self.label}', M={self.states.shape[0]})"


def _normalise_log_weights(log_w: np.ndarray) -> np.ndarray:
    return np.exp(log_w - logsumexp(log_w))


def gibbs_log_weights(states: np.ndarray, beta: float) -> np.ndarray:
    """log of multinomial(N; n) exp((beta / N) sum_k n_k (n_k - 1)), up to a constant."""
    n = float(states[0].sum())
    energy = np.sum(states * (states - 1), axis=1).astype(float)
    return log_multinomial(states) + beta / n * energy


def lumped_gibbs(n_vertices: int, q: int, beta: float, region: Optional[RestrictedRegion] = None) -> LumpedMeasure:
    """Gibbs measure of the complete-graph Potts model pushed to count vectors."""
    states = enumerate_states(n_vertices, q, region)
    return LumpedMeasure(states, _normalise_log_weights(gibbs_log_weights(states, beta)), label=f"gibbs(beta={beta})")


def lumped_gibbs_exp_form(n_vertices: int, q: int, beta: float) -> np.ndarray:
    """Unnormalised log weights in the form multinomial(N; n) exp(beta N ||n/N||^2)."""
    states = enumerate_states(n_vertices, q)
    s = states / float(n_vertices)
    return log_multinomial(states) + beta * n_vertices * np.sum(s * s, axis=1)


def conditional_multinomial(
    n_vertices: int, q: int, x: np.ndarray, region: Optional[RestrictedRegion] = None
) -> LumpedMeasure:
    """
    Product measure with marginal x pushed to counts and conditioned on the ball.

    Raises:
        UsageError when the ball carries no mass
    """
    x = np.asarray(x, dtype=float)
    full = enumerate_states(n_vertices, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.log(x)
        log_w = log_multinomial(full) + np.where(full > 0, full * log_x, 0.0).sum(axis=1)
    weights = _normalise_log_weights(log_w)
    if region is None:
        return LumpedMeasure(full, weights, label="multinomial")
    keep = np.fromiter((region.contains_counts(row) for row in full), dtype=bool, count=len(full))
    mass = float(weights[keep].sum())
    if not mass > 0.0:
        raise UsageError(f"the product measure puts no mass on {region!r}")
    return LumpedMeasure(full[keep], weights[keep] / mass, label="conditioned multinomial", captured_mass=mass)


class LumpedChain:
    """
    Explicit transition matrix over count vectors.

    Attributes:
        states: M x q count vectors in colexicographic order
        transition: M x M CSR row-stochastic matrix
        stationary: the Gibbs weights on the state set
    """

    def __init__(self, n_vertices: int, q: int, beta: float, states: np.ndarray, transition: sp.csr_matrix,
                 stationary: np.ndarray, region: Optional[RestrictedRegion] = None):
        self.n_vertices = n_vertices
        self.q = q
        self.beta = beta
        self.states = states
        self.transition = transition
        self.stationary = stationary
        self.region = region
        self.index: Dict[Tuple[int, ...], int] = {tuple(row): i for i, row in enumerate(states.tolist())}

    @property
    def size(self) -> int:
        return int(self.states.shape[0])

    def index_of(self, counts: np.ndarray) -> int:
        key = tuple(int(c) for c in counts)
        if key not in self.index:
            raise UsageError(f"count vector {list(key)} is not a state of this chain")
        return self.index[key]

    def row(self, counts: np.ndarray) -> np.ndarray:
        return self.transition.getrow(self.index_of(counts)).toarray().ravel()

    def stationary_residual(self, measure: Optional[np.ndarray] = None) -> float:
        pi = self.stationary if measure is None else measure
        return float(np.max(np.abs(self.transition.T @ pi - pi)))

    def state_function(self, fn: Callable[[np.ndarray], float]) -> np.ndarray:
        return np.array([fn(row) for row in self.states], dtype=float)

    def __repr__(self) -> str:
        return f"LumpedChain(N={self.n_vertices}, q={self.q}, beta={self.beta}, M={self.size})"


def lumped_transition_matrix(
    n_vertices: int, q: int, beta: float, region: Optional[RestrictedRegion] = None
) -> LumpedChain:
    """
    Exact lumped chain. A move k -> l has probability s_k g_beta^(l)(s - e_k / N); moves
    leaving the ball are folded into the diagonal.
    """
    states = enumerate_states(n_vertices, q, region)
    index = {tuple(row): i for i, row in enumerate(states.tolist())}
    rows, cols, vals = [], [], []
    for i, counts in enumerate(states):
        moves = cwp_move_probabilities(counts, beta)
        off_diagonal = 0.0
        for k in np.flatnonzero(counts):
            for l in range(q):
                if l == k or moves[k, l] == 0.0:
                    continue
                target = counts.copy()
                target[k] -= 1
                target[l] += 1
                j = index.get(tuple(target.tolist()))
                if j is None:
                    continue
                rows.append(i)
                cols.append(j)
                vals.append(moves[k, l])
                off_diagonal += moves[k, l]
        rows.append(i)
        cols.append(i)
        vals.append(1.0 - off_diagonal)
    size = len(states)
    transition = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    stationary = _normalise_log_weights(gibbs_log_weights(states, beta))
    chain = LumpedChain(n_vertices, q, beta, states, transition, stationary, region)
    logger.info("Built %r with %d nonzeros", chain, transition.nnz)
    return chain


def solve_stationary(transition: sp.spmatrix) -> np.ndarray:
    """Left fixed vector of an irreducible stochastic matrix by sparse LU."""
    size = transition.shape[0]
    system = (transition.T - sp.identity(size, format="csr")).tolil()
    system[0, :] = np.ones(size)
    rhs = np.zeros(size)
    rhs[0] = 1.0
    try:
        pi = splu(system.tocsc()).solve(rhs)
    except RuntimeError as e:
        raise SolverError(f"stationary system is singular: {e}")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.max(np.abs(transition.T @ pi - pi)))
    if residual > STATIONARY_TOL:
        raise SolverError(f"stationary residual {residual:.3e} above tolerance")
    return pi


def write_coordinate_text(matrix: sp.spmatrix, path: Union[str, Path], states: Optional[np.ndarray] = None) -> None:
    """
    Write a sparse matrix as "row col value" lines (0-based indices), preceded by a
    "M M nnz" header. With states, a companion "<path>.states" file lists one count vector
    per line in index order.
    """
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}"]
    lines += [f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}" for i in order]
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
        if states is not None:
            body = "\n".join(" ".join(str(int(c)) for c in row) for row in states)
            Path(f"{path}.states").write_text(body + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write matrix to {path}: {e}")
