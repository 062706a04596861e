"""
Critical temperatures and the scalar fixed-point equation of the Curie-Weiss-Potts model.

The order parameter s_{beta,q} is the largest solution of
    s = (1 - exp(-2 beta s)) / (1 + (q - 1) exp(-2 beta s)),
found by scanning (0, 1] from the right for a sign change and then bracketing.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.optimize import brentq

from ..errors import SolverError, UsageError

logger = logging.getLogger(__name__)

ROOT_XTOL = 1e-14
ROOT_TOL = 1e-12
SCAN_POINTS = 10_000
SPINODAL_TOL = 1e-10


class CriticalTemps(BaseModel):
    beta_c: float
    beta_s: float


def _require_q(q: int) -> None:
    if q < 3:
        raise UsageError("q must be ≥ 3")


def beta_c(q: int) -> float:
    """Critical inverse temperature (q - 1) log(q - 1) / (q - 2)."""
    _require_q(q)
    return (q - 1) * math.log(q - 1) / (q - 2)


def fixed_point_residual(s: np.ndarray, beta: float, q: int) -> np.ndarray:
    """s - (1 - e^{-2 beta s}) / (1 + (q - 1) e^{-2 beta s}); vectorised over s."""
    e = np.exp(-2.0 * beta * np.asarray(s, dtype=float))
    return s - (1.0 - e) / (1.0 + (q - 1) * e)


def solve_s_largest(beta: float, q: int) -> float:
    """
    Largest root of the order-parameter equation in [0, 1).

    Args:
        beta: inverse temperature
        q: number of colors

    Returns:
        s_{beta,q}; 0.0 when the only root is the trivial one
    """
    _require_q(q)
    if beta <= 0:
        return 0.0
    grid = np.linspace(0.0, 1.0, SCAN_POINTS + 1)[1:]
    values = fixed_point_residual(grid, beta, q)
    # values[-1] > 0 always: the right-hand side is below 1 at s = 1
    nonpositive = np.flatnonzero(values <= 0.0)
    if nonpositive.size == 0:
        return 0.0
    i = int(nonpositive[-1])
    if values[i] == 0.0:
        return float(grid[i])
    lo, hi = float(grid[i]), float(grid[i + 1])
    root = brentq(lambda s: float(fixed_point_residual(s, beta, q)), lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)
    residual = abs(float(fixed_point_residual(root, beta, q)))
    if residual > ROOT_TOL:
        raise SolverError(f"order parameter residual {residual:.3e} above tolerance at beta={beta}, q={q}")
    return float(root)


def s_star(beta: float, q: int) -> float:
    """Dominant coordinate (1 + (q - 1) s_{beta,q}) / q of the ordered macrostate."""
    return (1.0 + (q - 1) * solve_s_largest(beta, q)) / q


def spinodal_function(x: np.ndarray, beta: float, q: int) -> np.ndarray:
    """f(x, beta) = (1 + (q - 1) exp(2 beta (1 - q x) / (q - 1)))^{-1} - x."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + (q - 1) * np.exp(2.0 * beta * (1.0 - q * x) / (q - 1))) - x


def spinodal_derivative(x: np.ndarray, beta: float, q: int) -> np.ndarray:
    """Partial derivative of f in x."""
    x = np.asarray(x, dtype=float)
    logistic = 1.0 / (1.0 + (q - 1) * np.exp(2.0 * beta * (1.0 - q * x) / (q - 1)))
    return 2.0 * beta * q / (q - 1) * logistic * (1.0 - logistic) - 1.0


def _interior_maximum(beta: float, q: int, points: int = 4000) -> Optional[Tuple[float, float]]:
    """Location and value of the interior local maximum of f(., beta) on (1/q, 1), if any."""
    grid = np.linspace(1.0 / q, 1.0, points + 2)[1:-1]
    slope = spinodal_derivative(grid, beta, q)
    # the derivative changes sign + -> - exactly once at an interior maximum
    downward = np.flatnonzero((slope[:-1] > 0.0) & (slope[1:] <= 0.0))
    if downward.size == 0:
        return None
    i = int(downward[-1])
    x_max = brentq(lambda x: float(spinodal_derivative(x, beta, q)), grid[i], grid[i + 1], xtol=ROOT_XTOL)
    return x_max, float(spinodal_function(x_max, beta, q))


def has_spinodal_root(beta: float, q: int) -> bool:
    """True when f(., beta) has a root in the open interval (1/q, 1)."""
    peak = _interior_maximum(beta, q)
    return peak is not None and peak[1] >= 0.0


def beta_s(q: int) -> float:
    """
    Spinodal inverse temperature.

    Solved as the tangency f = 0 and df/dx = 0 by bisection on beta, with the inner
    maximiser of f located by a root of df/dx.
    """
    _require_q(q)
    lo, hi = 1.0, q / 2.0
    if has_spinodal_root(lo, q) or not has_spinodal_root(hi, q):
        raise SolverError(f"no spinodal tangency bracketed in [{lo}, {hi}] for q={q}")
    while hi - lo > SPINODAL_TOL:
        mid = 0.5 * (lo + hi)
        if has_spinodal_root(mid, q):
            hi = mid
        else:
            lo = mid
    logger.debug("beta_s(q=%d) bracketed in [%.12f, %.12f]", q, lo, hi)
    return 0.5 * (lo + hi)


def critical_temps(q: int) -> CriticalTemps:
    return CriticalTemps(beta_c=beta_c(q), beta_s=beta_s(q))
