"""
Worst-case total variation curves and exact integer mixing times of explicit chains.
"""
import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel

from ..errors import ResourceError, UsageError

logger = logging.getLogger(__name__)

DENSE_LIMIT = 4000
BLOCK_SIZE = 256
MAX_DOUBLINGS = 40


class MixingResult(BaseModel):
    """Worst-case TV at doubling times and the exact t_mix(epsilon)."""

    epsilon: float
    t_mix: int
    curve: List[Tuple[int, float]]


def worst_tv(rows: np.ndarray, stationary: np.ndarray) -> float:
    """max over rows of 1/2 ||row - pi||_1."""
    return float(0.5 * np.max(np.abs(rows - stationary[None, :]).sum(axis=1)))


def _dense_tmix(transition: sp.spmatrix, stationary: np.ndarray, epsilon: float) -> MixingResult:
    size = transition.shape[0]
    curve = [(0, worst_tv(np.eye(size), stationary))]
    if curve[0][1] <= epsilon:
        return MixingResult(epsilon=epsilon, t_mix=0, curve=curve)

    powers = [transition.toarray()]
    distance = worst_tv(powers[0], stationary)
    curve.append((1, distance))
    if distance <= epsilon:
        return MixingResult(epsilon=epsilon, t_mix=1, curve=curve)
    # powers[j] holds P^(2^j) for every doubling time still above epsilon
    while True:
        if len(powers) > MAX_DOUBLINGS:
            raise ResourceError(f"worst-case TV still {distance:.3g} after 2^{MAX_DOUBLINGS} steps")
        squared = powers[-1] @ powers[-1]
        distance = worst_tv(squared, stationary)
        curve.append((2 ** len(powers), distance))
        logger.debug("d(%d) = %.6g", curve[-1][0], distance)
        if distance <= epsilon:
            break
        powers.append(squared)
    del squared

    # largest t with d(t) > epsilon, built from binary digits below the top power; each power
    # is released once its digit is decided
    t = 2 ** (len(powers) - 1)
    current = powers.pop()
    while powers:
        j = len(powers) - 1
        candidate = current @ powers.pop()
        if worst_tv(candidate, stationary) > epsilon:
            current = candidate
            t += 2 ** j
    return MixingResult(epsilon=epsilon, t_mix=t + 1, curve=curve)


def _propagated_tmix(transition: sp.spmatrix, stationary: np.ndarray, epsilon: float, max_steps: int) -> MixingResult:
    """Step every start distribution forward block by block until all are within epsilon."""
    size = transition.shape[0]
    transition_t = sp.csr_matrix(transition.T)
    doubling = {0}
    doubling.update(2 ** j for j in range(MAX_DOUBLINGS))
    worst_at: dict = {}
    t_mix = 0
    for start in range(0, size, BLOCK_SIZE):
        block = np.zeros((min(BLOCK_SIZE, size - start), size))
        block[np.arange(block.shape[0]), np.arange(start, start + block.shape[0])] = 1.0
        t = 0
        distance = worst_tv(block, stationary)
        worst_at[0] = max(worst_at.get(0, 0.0), distance)
        while distance > epsilon:
            if t >= max_steps:
                raise ResourceError(f"worst-case TV still {distance:.3g} after {max_steps} steps")
            block = (transition_t @ block.T).T
            t += 1
            distance = worst_tv(block, stationary)
            if t in doubling:
                worst_at[t] = max(worst_at.get(t, 0.0), distance)
        t_mix = max(t_mix, t)
        logger.debug("block starting at %d mixed after %d steps", start, t)
    curve = sorted(worst_at.items())
    return MixingResult(epsilon=epsilon, t_mix=t_mix, curve=curve)


def tv_curve_and_tmix(chain, epsilon: float = 0.25, max_steps: int = 10 ** 7) -> MixingResult:
    """
    Worst-case-over-starts TV distance to stationarity and the exact t_mix(epsilon).

    Args:
        chain: any object with a row-stochastic sparse `transition` and a `stationary` vector
        epsilon: threshold in (0, 1)
        max_steps: step budget for the propagated path

    Chains with at most 4000 states use dense powering at doubling times refined by binary
    search; larger chains propagate blocks of start distributions with sparse products.
    """
    if not 0.0 < epsilon < 1.0:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    stationary = np.asarray(chain.stationary, dtype=float)
    if chain.transition.shape[0] <= DENSE_LIMIT:
        return _dense_tmix(chain.transition, stationary, epsilon)
    return _propagated_tmix(chain.transition, stationary, epsilon, max_steps)


def tv_from_start(chain, start: int, steps: int, stride: Optional[int] = None) -> List[Tuple[int, float]]:
    """TV distance to stationarity of the chain started at one state, every `stride` steps."""
    stride = stride or 1
    transition_t = sp.csr_matrix(chain.transition.T)
    dist = np.zeros(chain.transition.shape[0])
    dist[start] = 1.0
    out = [(0, 0.5 * float(np.abs(dist - chain.stationary).sum()))]
    for t in range(1, steps + 1):
        dist = transition_t @ dist
        if t % stride == 0:
            out.append((t, 0.5 * float(np.abs(dist - chain.stationary).sum())))
    return out
