"""
Mixing-time ceilings from coupling tails.

t_mix(1/4) <= t whenever P(tau_couple > t) <= 1/4 for every pair of starts. The pairs are
sampled (ball extremes plus random pairs), so the maximum reported here is a lower bound on
the true worst case over all pairs.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..dynamics import ChainState, RestrictedRegion, ball_extreme_counts, nearest_counts
from ..errors import UsageError
from ..spin_core import ModelParams, make_stream
from .contracting import two_phase_coalescence

logger = logging.getLogger(__name__)

TARGET_TAIL = 0.25
PAIR_STREAM = 7


class CouplingBound(BaseModel):
    """Outcome of coupling_tmix_upper; t is None when the budget did not allow an estimate."""

    t: Optional[int] = None
    worst_pair: Optional[Tuple[List[int], List[int]]] = None
    margin: float
    replicas: int
    pairs: int
    censored: int = 0
    diagnostics: str = ""
    taus: List[Optional[int]] = Field(default_factory=list, exclude=True)


def hoeffding_margin(replicas: int, confidence: float) -> float:
    """Deviation d with P(empirical tail < true tail - d) <= 1 - confidence."""
    return math.sqrt(math.log(1.0 / (1.0 - confidence)) / (2.0 * replicas))


def _extreme_counts(region: Optional[RestrictedRegion], n_vertices: int, q: int) -> List[np.ndarray]:
    if region is None:
        return [np.eye(q, dtype=np.int64)[k] * n_vertices for k in range(q)]
    return ball_extreme_counts(region, n_vertices)


def _random_counts(region: Optional[RestrictedRegion], n_vertices: int, q: int, rng: np.random.Generator) -> np.ndarray:
    center = np.full(q, 1.0 / q) if region is None else region.center
    for _ in range(1000):
        if region is None:
            return rng.multinomial(n_vertices, center)
        step = rng.normal(size=q)
        step -= step.mean()
        point = center + region.radius * rng.random() * step / np.linalg.norm(step)
        if np.all(point >= 0):
            counts = nearest_counts(point, n_vertices)
            if region.contains_counts(counts):
                return counts
    return nearest_counts(center, n_vertices)


def start_pairs(
    region: Optional[RestrictedRegion], n_vertices: int, q: int, rng: np.random.Generator, random_pairs: int = 4
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Pairs of configurations far apart in both proportions and Hamming distance.

    Extreme count vectors are paired with each other; sigma is laid out in color blocks and
    tau in reversed block order so that the two disagree on as many vertices as possible.
    """
    extremes = _extreme_counts(region, n_vertices, q)
    count_pairs = [(a, b) for i, a in enumerate(extremes) for b in extremes[i + 1:]]
    if len(extremes) == 1:
        count_pairs.append((extremes[0], extremes[0]))
    for _ in range(random_pairs):
        count_pairs.append((_random_counts(region, n_vertices, q, rng), _random_counts(region, n_vertices, q, rng)))
    pairs = []
    for a, b in count_pairs:
        sigma = ChainState.from_counts(a, q).config
        tau = ChainState.from_counts(b, q).config[::-1].copy()
        pairs.append((sigma, tau))
    return pairs


def tail_quantile(taus: List[Optional[int]], allowed_tail: float) -> Optional[int]:
    """Smallest t with (number of tau > t) / R <= allowed_tail; None counts as infinite."""
    replicas = len(taus)
    allowed = int(math.floor(allowed_tail * replicas + 1e-9))
    finite = sorted(tau for tau in taus if tau is not None)
    censored = replicas - len(finite)
    if censored > allowed:
        return None
    # drop the `allowed` largest values; the largest survivor is the quantile
    keep = replicas - allowed
    if keep <= 0:
        return 0
    return int(finite[keep - 1])


def coupling_tmix_upper(
    region: Optional[RestrictedRegion],
    p: ModelParams,
    seed: int,
    confidence: float = 0.95,
    replicas: int = 200,
    max_steps: int = 10 ** 6,
    random_pairs: int = 4,
    workers: int = 1,
) -> CouplingBound:
    """
    Estimate t with max over sampled start pairs of P(tau_couple > t) <= 1/4.

    For each pair, `replicas` coupled runs give an empirical tail; requiring it to sit below
    1/4 - sqrt(log(1/(1 - confidence)) / (2R)) makes the bound hold for that pair with the
    given confidence. The runs themselves do not depend on the confidence, so raising it
    never lowers t.

    Returns:
        CouplingBound with t None and a diagnostic message when the margin swallows the
        1/4 target or too many runs hit max_steps
    """
    if not 0.0 < confidence < 1.0:
        raise UsageError(f"confidence must lie in (0, 1), got {confidence}")
    if replicas < 1:
        raise UsageError("replicas must be positive")
    margin = hoeffding_margin(replicas, confidence)
    pairs = start_pairs(region, p.n_vertices, p.q, make_stream(seed, 0, PAIR_STREAM), random_pairs)
    bound = CouplingBound(margin=margin, replicas=replicas, pairs=len(pairs))
    allowed_tail = TARGET_TAIL - margin
    if allowed_tail <= 0:
        bound.diagnostics = f"Hoeffding margin {margin:.3f} leaves no room below 1/4; raise replicas"
        return bound

    worst: Optional[int] = None
    for index, (sigma, tau) in enumerate(pairs):
        def run(replica: int) -> Optional[int]:
            stream_replica = index * replicas + replica
            trace = two_phase_coalescence(sigma, tau, region, p, seed, stream_replica, max_steps, record_every=max_steps)
            return trace.tau_couple

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            taus = list(pool.map(run, range(replicas)))
        censored = sum(tau is None for tau in taus)
        bound.censored += censored
        t = tail_quantile(taus, allowed_tail)
        logger.info("start pair %d/%d: tail quantile %s (%d censored)", index + 1, len(pairs), t, censored)
        if t is None:
            bound.t = None
            bound.worst_pair = (np.bincount(sigma, minlength=p.q).tolist(), np.bincount(tau, minlength=p.q).tolist())
            bound.diagnostics = f"{censored} of {replicas} runs reached max_steps={max_steps} for start pair {index}"
            return bound
        if worst is None or t > worst:
            worst = t
            bound.taus = taus
            bound.worst_pair = (np.bincount(sigma, minlength=p.q).tolist(), np.bincount(tau, minlength=p.q).tolist())
    bound.t = worst
    return bound
