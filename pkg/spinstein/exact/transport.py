"""
Exact Wasserstein distances under the Hamming ground metric.

For exchangeable measures the configuration-level problem reduces to transport between
count vectors with cost 1/2 ||n - n'||_1, the number of vertices that must be recolored.
That cost is the path length in the lattice whose arcs move one vertex from color k to
color l, so the transport is solved as a unit-cost transshipment problem on that lattice
with scipy's HiGHS linear programming backend.
"""
import logging
from typing import Dict, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel
from scipy.optimize import linprog

from ..errors import SolverError, UsageError
from ..spin_core import hamming
from .lumped import LumpedMeasure, enumerate_states

logger = logging.getLogger(__name__)

LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


class TransportResult(BaseModel):
    value: float
    dual_value: float
    duality_gap: float
    nodes: int
    arcs: int


def _masses(measure: LumpedMeasure) -> Dict[Tuple[int, ...], float]:
    return {tuple(row): float(w) for row, w in zip(measure.states.tolist(), measure.weights)}


def _pruned(masses: Dict[Tuple[int, ...], float], keep: set) -> Dict[Tuple[int, ...], float]:
    kept = {key: masses.get(key, 0.0) for key in keep}
    total = sum(kept.values())
    return {key: value / total for key, value in kept.items()}


def solve_lumped_transport(mu: LumpedMeasure, nu: LumpedMeasure, prune_below: float = 0.0) -> TransportResult:
    """
    Min-cost transshipment between two measures on count vectors.

    Args:
        mu, nu: measures over count vectors of the same N and q
        prune_below: states where both measures are at most this are dropped and the
            remaining mass renormalised; 0 keeps the full supports

    Raises:
        SolverError when the linear program does not solve to optimality
    """
    if mu.n_vertices != nu.n_vertices or mu.q != nu.q:
        raise UsageError("measures live on different lumped spaces")
    mass_mu, mass_nu = _masses(mu), _masses(nu)
    support = {k for k, v in mass_mu.items() if v > prune_below} | {k for k, v in mass_nu.items() if v > prune_below}
    if prune_below > 0.0:
        mass_mu, mass_nu = _pruned(mass_mu, support), _pruned(mass_nu, support)

    keys = np.array(sorted(support), dtype=np.int64)
    lo, hi = keys.min(axis=0), keys.max(axis=0)
    lattice = enumerate_states(mu.n_vertices, mu.q)
    lattice = lattice[np.all((lattice >= lo) & (lattice <= hi), axis=1)]
    index = {tuple(row): i for i, row in enumerate(lattice.tolist())}
    balance = np.array([mass_mu.get(key, 0.0) - mass_nu.get(key, 0.0) for key in index])
    if np.max(np.abs(balance)) < 1e-15:
        return TransportResult(value=0.0, dual_value=0.0, duality_gap=0.0, nodes=len(index), arcs=0)

    tails, heads = [], []
    q = mu.q
    for i, counts in enumerate(lattice.tolist()):
        for k in range(q):
            if counts[k] <= lo[k]:
                continue
            for l in range(q):
                if l == k or counts[l] >= hi[l]:
                    continue
                target = list(counts)
                target[k] -= 1
                target[l] += 1
                j = index.get(tuple(target))
                if j is not None:
                    tails.append(i)
                    heads.append(j)
    arcs = len(tails)
    columns = np.arange(arcs)
    incidence = sp.csr_matrix(
        (np.concatenate([np.ones(arcs), -np.ones(arcs)]), (np.concatenate([tails, heads]), np.concatenate([columns, columns]))),
        shape=(len(index), arcs),
    )
    # one balance row is implied by the others
    result = linprog(
        np.ones(arcs), A_eq=incidence[:-1], b_eq=balance[:-1], bounds=(0, None), method="highs", options=LP_OPTIONS
    )
    if result.status != 0:
        raise SolverError(f"transport problem failed: {result.message}")
    dual_value = float(balance[:-1] @ result.eqlin.marginals)
    gap = abs(result.fun - dual_value)
    logger.debug("transport on %d nodes / %d arcs: value %.12g, gap %.2e", len(index), arcs, result.fun, gap)
    return TransportResult(value=float(result.fun), dual_value=dual_value, duality_gap=gap, nodes=len(index), arcs=arcs)


def exact_wasserstein_exchangeable(mu: LumpedMeasure, nu: LumpedMeasure, prune_below: float = 0.0) -> float:
    """d_W(mu, nu) under the Hamming metric for exchangeable measures given on count vectors."""
    return solve_lumped_transport(mu, nu, prune_below).value


def point_mass(states: np.ndarray, counts: np.ndarray) -> LumpedMeasure:
    weights = np.zeros(states.shape[0])
    matches = np.flatnonzero(np.all(states == np.asarray(counts), axis=1))
    if matches.size != 1:
        raise UsageError(f"{list(counts)} is not one of the states")
    weights[matches[0]] = 1.0
    return LumpedMeasure(states, weights, label=f"delta{list(counts)}")


def configuration_wasserstein(p: np.ndarray, r: np.ndarray, configs: np.ndarray) -> float:
    """
    Wasserstein distance under d_H between two measures on an explicit configuration list,
    solved as a dense transport linear program. Intended for q^N in the hundreds.
    """
    size = configs.shape[0]
    cost = np.array([[hamming(a, b) for b in configs] for a in configs], dtype=float).ravel()
    rows = np.repeat(np.arange(size), size)
    cols = np.tile(np.arange(size), size)
    flat = np.arange(size * size)
    constraints = sp.vstack([
        sp.csr_matrix((np.ones(size * size), (rows, flat)), shape=(size, size * size)),
        sp.csr_matrix((np.ones(size * size), (cols, flat)), shape=(size, size * size)),
    ]).tocsr()
    rhs = np.concatenate([p, r])
    result = linprog(cost, A_eq=constraints[:-1], b_eq=rhs[:-1], bounds=(0, None), method="highs", options=LP_OPTIONS)
    if result.status != 0:
        raise SolverError(f"configuration transport failed: {result.message}")
    return float(result.fun)
