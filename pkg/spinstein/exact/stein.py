"""
Exact solution of the Stein-Poisson equation (P - I) f = -(h - E_pi h) on an explicit chain.
"""
import logging
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import SolverError, UsageError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
REFINEMENT_STEPS = 5


class SteinSolution:
    """f_h on the chain's states, with the centred test function and the attained residual."""

    def __init__(self, values: np.ndarray, centred: np.ndarray, mean: float, residual: float):
        self.values = values
        self.centred = centred
        self.mean = mean
        self.residual = residual

    def __repr__(self) -> str:
        return f"SteinSolution(M={self.values.size}, residual={self.residual:.2e})"


def _centre(chain, h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (chain.transition.shape[0],):
        raise UsageError(f"test function has {h.size} values for {chain.transition.shape[0]} states")
    return h - float(chain.stationary @ h)


def solve_stein_poisson(chain, h: np.ndarray) -> SteinSolution:
    """
    Solve (P - I) f = -(h - E_pi h) with the normalisation pi . f = 0.

    The row of state 0 is replaced by the normalisation (the replaced equation follows from
    the others because pi is a left null vector of P - I), the system is factorised with
    sparse LU, and a few rounds of iterative refinement drive the residual down.

    Raises:
        SolverError if the residual stays above 1e-9
    """
    centred = _centre(chain, h)
    size = centred.size
    generator = sp.csr_matrix(chain.transition) - sp.identity(size, format="csr")
    system = generator.tolil()
    system[0, :] = chain.stationary
    system = system.tocsc()
    rhs = -centred.copy()
    rhs[0] = 0.0
    try:
        lu = splu(system)
    except RuntimeError as e:
        raise SolverError(f"Stein system is singular: {e}")

    f = lu.solve(rhs)
    residual = float(np.max(np.abs(generator @ f + centred)))
    for _ in range(REFINEMENT_STEPS):
        if residual < RESIDUAL_TOL * 1e-2:
            break
        f = f + lu.solve(rhs - system @ f)
        residual = float(np.max(np.abs(generator @ f + centred)))
    if residual > RESIDUAL_TOL:
        raise SolverError(f"Stein residual {residual:.3e} above {RESIDUAL_TOL}")
    logger.debug("Stein solve on %d states, residual %.2e", size, residual)
    return SteinSolution(f, centred, float(chain.stationary @ np.asarray(h, dtype=float)), residual)


def stein_series(chain, h: np.ndarray, terms: int) -> np.ndarray:
    """Truncated series sum_{t < terms} (P^t h - E_pi h)."""
    centred = _centre(chain, h)
    transition = sp.csr_matrix(chain.transition)
    term = centred.copy()
    total = np.zeros_like(centred)
    for _ in range(terms):
        total += term
        term = transition @ term
    return total


def neighbour_lipschitz(chain, values: np.ndarray, states: Optional[np.ndarray] = None) -> float:
    """
    max |f(n) - f(n')| over pairs of count vectors that differ by recoloring one vertex.
    """
    states = chain.states if states is None else states
    index = {tuple(row): i for i, row in enumerate(states.tolist())}
    q = states.shape[1]
    best = 0.0
    for i, counts in enumerate(states.tolist()):
        for k in range(q):
            if counts[k] == 0:
                continue
            for l in range(q):
                if l == k:
                    continue
                target = list(counts)
                target[k] -= 1
                target[l] += 1
                j = index.get(tuple(target))
                if j is not None:
                    best = max(best, abs(values[i] - values[j]))
    return best
