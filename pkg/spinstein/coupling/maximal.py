"""
Maximal coupling of two categorical distributions.
"""
from typing import Tuple

import numpy as np


def _inverse_cdf(weights: np.ndarray, u: float) -> int:
    cumulative = np.cumsum(weights)
    index = int(np.searchsorted(cumulative, u, side="right"))
    return min(index, len(weights) - 1)


def maximal_coupling_sample(p: np.ndarray, r: np.ndarray, rng: np.random.Generator) -> Tuple[int, int]:
    """
    Draw (i, j) with i ~ p, j ~ r and P(i != j) = TV(p, r).

    One uniform U decides the branch: U below the overlap mass sum_k min(p_k, r_k) selects a
    shared color from the overlap (reusing U); otherwise i and j are drawn independently
    from the renormalised residuals, both scanned in ascending color order.
    """
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    overlap = np.minimum(p, r)
    shared = float(overlap.sum())
    u = rng.random()
    if u < shared:
        k = _inverse_cdf(overlap, u)
        return k, k
    rest_p = p - overlap
    rest_r = r - overlap
    # shared falls short of 1 only by rounding when p == r
    if rest_p.sum() <= 0.0 or rest_r.sum() <= 0.0:
        k = _inverse_cdf(overlap, rng.random() * shared)
        return k, k
    i = _inverse_cdf(rest_p, rng.random() * rest_p.sum())
    j = _inverse_cdf(rest_r, rng.random() * rest_r.sum())
    return i, j
