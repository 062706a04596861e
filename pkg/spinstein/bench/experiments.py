"""
Scaling experiments over N and beta, each returning an ExperimentTable ready for CSV.

Every stochastic experiment takes a seed and derives one stream per (replica, substream),
so reruns with the same arguments give identical tables.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel, Field

from ..coupling import CoupledState, contracting_pair_step, start_pairs, two_phase_coalescence
from ..dynamics import ChainState, RestrictedRegion, ball_extreme_counts, nearest_counts, run_trajectory
from ..errors import DomainError, UsageError
from ..exact import (
    conditional_multinomial,
    lumped_gibbs,
    lumped_transition_matrix,
    solve_lumped_transport,
    tv_curve_and_tmix,
)
from ..macrostates import beta_s, select_macrostate, theta
from ..spin_core import ModelParams, make_stream

logger = logging.getLogger(__name__)

T = TypeVar("T")

CHECKPOINTS = 20
ENVELOPE_STREAM = 3
CONCENTRATION_STREAM = 4


class ExperimentTable(BaseModel):
    """Rows of one experiment with a fixed column order and a few summary statistics."""

    name: str
    columns: List[str]
    rows: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

    def column(self, key: str) -> List[Any]:
        return [row[key] for row in self.rows]


def _run_jobs(fn: Callable[[Any], T], jobs: Sequence[Any], workers: int) -> List[T]:
    """Map fn over jobs on a thread pool, keeping the input order."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _band_ratio(values: List[float]) -> Optional[float]:
    values = [v for v in values if v is not None and v > 0]
    if not values:
        return None
    return max(values) / min(values)


class CltReport(BaseModel):
    """Exact finite-N covariance of sqrt(N)(S - e_hat) against the Gaussian limits."""

    n: int
    q: int
    beta: float
    gibbs_diag: float
    gibbs_offdiag: float
    product_diag: float
    product_offdiag: float
    limit_diag: float
    limit_offdiag_printed: float
    limit_offdiag_consistent: float
    product_limit_diag: float
    product_limit_offdiag: float
    printed_offdiag_matches: bool


def _scaled_covariance(states: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    q = states.shape[1]
    centred = states / float(n) - 1.0 / q
    return n * (centred.T * weights) @ centred


def clt_covariance_check(n: int, q: int, beta: float, tolerance: float = 0.05) -> CltReport:
    """
    E[W W^T] for W = sqrt(N)(S - e_hat) under the lumped Gibbs measure and under i.i.d.
    uniform spins, by exact summation over count vectors.

    The diagonal limit is (q-1)/(q^2 - 2 q beta). For the off-diagonal both -1/(q^2 - 2 beta)
    and -1/(q^2 - 2 q beta) are reported; only the second is compatible with rows summing
    to zero, and printed_offdiag_matches records whether the first agrees with the data.

    Raises:
        DomainError unless beta < beta_s(q)
    """
    spinodal = beta_s(q)
    if not beta < spinodal:
        raise DomainError(f"the covariance limit needs beta < beta_s(q) = {spinodal:.6f}, got beta = {beta}")
    gibbs = lumped_gibbs(n, q, beta)
    product = conditional_multinomial(n, q, np.full(q, 1.0 / q))
    cov_x = _scaled_covariance(gibbs.states, gibbs.weights, n)
    cov_y = _scaled_covariance(product.states, product.weights, n)
    off = ~np.eye(q, dtype=bool)
    printed = -1.0 / (q * q - 2.0 * beta)
    consistent = -1.0 / (q * q - 2.0 * q * beta)
    gibbs_offdiag = float(cov_x[off].mean())
    return CltReport(
        n=n,
        q=q,
        beta=beta,
        gibbs_diag=float(np.diag(cov_x).mean()),
        gibbs_offdiag=gibbs_offdiag,
        product_diag=float(np.diag(cov_y).mean()),
        product_offdiag=float(cov_y[off].mean()),
        limit_diag=(q - 1.0) / (q * q - 2.0 * q * beta),
        limit_offdiag_printed=printed,
        limit_offdiag_consistent=consistent,
        product_limit_diag=(q - 1.0) / (q * q),
        product_limit_offdiag=-1.0 / (q * q),
        printed_offdiag_matches=bool(abs(gibbs_offdiag - printed) <= tolerance),
    )


def wasserstein_scaling(
    q: int,
    beta: float,
    selector: str,
    radius: Optional[float],
    n_values: Sequence[int],
    prune_below: float = 1e-14,
    workers: int = 1,
) -> ExperimentTable:
    """
    Exact d_W between the Gibbs measure and the product measure at x across N.

    With a radius both measures are conditioned on the ball around x; without one the full
    measures are compared, which needs x = e_hat for the product side to be a mean-field
    solution. Reports d_W / sqrt(N) and its band ratio max/min across N.
    """
    x = select_macrostate(selector, beta, q)

    def one(n: int) -> Dict[str, Any]:
        region = RestrictedRegion(x, radius) if radius is not None else None
        mu = lumped_gibbs(n, q, beta, region)
        nu = conditional_multinomial(n, q, x, region)
        result = solve_lumped_transport(mu, nu, prune_below=prune_below)
        logger.info("N=%d: d_W=%.6g over %d nodes", n, result.value, result.nodes)
        return {
            "n": n,
            "states": int(mu.states.shape[0]),
            "d_w": result.value,
            "d_w_over_sqrt_n": result.value / math.sqrt(n),
            "duality_gap": result.duality_gap,
        }

    rows = _run_jobs(one, list(n_values), workers)
    return ExperimentTable(
        name="wscaling",
        columns=["n", "states", "d_w", "d_w_over_sqrt_n", "duality_gap"],
        rows=rows,
        summary={"band_ratio": _band_ratio([row["d_w_over_sqrt_n"] for row in rows])},
    )


def theta_star_trend(q: int, selector: str, betas: Sequence[float]) -> ExperimentTable:
    """
    theta and the prefactor proxy 4 q theta / (1 - theta) along beta.

    The proxy stands in for the unspecified constant of the approximation bounds; it is
    not that constant.
    """
    rows = []
    for beta in betas:
        x = select_macrostate(selector, beta, q)
        rate = theta(x, beta, q)
        proxy = 4.0 * q * rate / (1.0 - rate) if rate < 1.0 else math.inf
        rows.append({"beta": float(beta), "theta": rate, "proxy": proxy})
    return ExperimentTable(name="theta-trend", columns=["beta", "theta", "proxy"], rows=rows)


def restricted_tmix_scaling(
    q: int,
    beta: float,
    selector: str,
    radius: float,
    n_values: Sequence[int],
    epsilon: float = 0.25,
    workers: int = 1,
) -> ExperimentTable:
    """
    Exact t_mix(epsilon) of the restricted lumped chain across N, normalised by N log N,
    next to the coupling ceiling 2 / (1 - theta).
    """
    x = select_macrostate(selector, beta, q)
    rate = theta(x, beta, q)
    ceiling = 2.0 / (1.0 - rate) if rate < 1.0 else math.inf

    def one(n: int) -> Dict[str, Any]:
        chain = lumped_transition_matrix(n, q, beta, RestrictedRegion(x, radius))
        t_mix = tv_curve_and_tmix(chain, epsilon).t_mix
        return {
            "n": n,
            "states": chain.size,
            "t_mix": t_mix,
            "t_mix_over_n_log_n": t_mix / (n * math.log(n)),
            "coupling_ceiling": ceiling,
        }

    rows = _run_jobs(one, list(n_values), workers)
    return ExperimentTable(
        name="restricted-tmix",
        columns=["n", "states", "t_mix", "t_mix_over_n_log_n", "coupling_ceiling"],
        rows=rows,
        summary={"band_ratio": _band_ratio([row["t_mix_over_n_log_n"] for row in rows]), "theta": rate},
    )


def coalescence_tail(
    q: int,
    beta: float,
    selector: str,
    radius: float,
    n: int,
    replicas: int,
    seed: int,
    alphas: Sequence[float] = (5.0, 10.0, 20.0),
    max_steps: int = 10 ** 7,
    workers: int = 1,
) -> ExperimentTable:
    """
    Empirical P(tau_couple > (2/(1-theta)) N log N + alpha N) against exp(-(1-theta) alpha / 2),
    from the first extreme start pair of the ball.
    """
    x = select_macrostate(selector, beta, q)
    region = RestrictedRegion(x, radius)
    rate = theta(x, beta, q)
    if not rate < 1.0:
        raise DomainError(f"theta = {rate:.6g} is not below 1 at this macrostate")
    p = ModelParams(q=q, beta=beta, n_vertices=n)
    sigma, tau = start_pairs(region, n, q, make_stream(seed), random_pairs=0)[0]

    def one(replica: int) -> Optional[int]:
        trace = two_phase_coalescence(sigma, tau, region, p, seed, replica, max_steps, record_every=max_steps)
        return trace.tau_couple

    taus = _run_jobs(one, list(range(replicas)), workers)
    base = 2.0 / (1.0 - rate) * n * math.log(n)
    rows = []
    for alpha in alphas:
        threshold = base + alpha * n
        exceed = sum(1 for t in taus if t is None or t > threshold)
        rows.append({
            "alpha": float(alpha),
            "threshold": threshold,
            "ccdf": exceed / float(replicas),
            "reference": math.exp(-(1.0 - rate) * alpha / 2.0),
        })
    finite = [t for t in taus if t is not None]
    return ExperimentTable(
        name="coalescence-tail",
        columns=["alpha", "threshold", "ccdf", "reference"],
        rows=rows,
        summary={
            "theta": rate,
            "censored": replicas - len(finite),
            "median_tau": float(np.median(finite)) if finite else None,
        },
    )


def concentration_run(
    q: int,
    beta: float,
    selector: str,
    radius: float,
    n_values: Sequence[int],
    replicas: int,
    seed: int,
    steps: int,
    workers: int = 1,
) -> ExperimentTable:
    """
    Stopping times of the restricted chain: tau_out from the center of the ball and tau_in
    from a boundary point, per N and replica. The summary holds median(tau_in) / N per N.
    """
    x = select_macrostate(selector, beta, q)
    region = RestrictedRegion(x, radius)

    def one(job) -> Dict[str, Any]:
        n, replica = job
        p = ModelParams(q=q, beta=beta, n_vertices=n)
        rng = make_stream(seed, replica, CONCENTRATION_STREAM)
        center = nearest_counts(x, n)
        if not region.contains_counts(center):
            raise UsageError(f"no count vector near the center of {region!r} for N={n}")
        outward = run_trajectory(
            ChainState.from_counts(center, q, rng), steps, p, rng, region=region, record_path=False, stop_at="tau_out"
        )
        extremes = ball_extreme_counts(region, n)
        inward = run_trajectory(
            ChainState.from_counts(extremes[0], q, rng), steps, p, rng, region=region, record_path=False, stop_at="tau_in"
        )
        return {
            "n": n,
            "replica": replica,
            "tau_out": outward.stopping_times.tau_out,
            "tau_in": inward.stopping_times.tau_in,
        }

    jobs = [(n, replica) for n in n_values for replica in range(replicas)]
    rows = _run_jobs(one, jobs, workers)
    fitted = {}
    for n in n_values:
        entries = [row["tau_in"] for row in rows if row["n"] == n and row["tau_in"] is not None]
        fitted[str(n)] = float(np.median(entries)) / n if entries else None
    return ExperimentTable(
        name="concentration",
        columns=["n", "replica", "tau_out", "tau_in"],
        rows=rows,
        summary={"median_tau_in_over_n": fitted},
    )


def displaced_configuration(sigma: np.ndarray, distance: int, q: int) -> np.ndarray:
    """
    A configuration with the same counts as sigma at Hamming distance 2 * (distance // 2),
    made by swapping colors between majority-color vertices and the rest.
    """
    counts = np.bincount(sigma, minlength=q)
    major = int(np.argmax(counts))
    inside = np.flatnonzero(sigma == major)
    outside = np.flatnonzero(sigma != major)
    swaps = distance // 2
    if swaps > min(inside.size, outside.size):
        raise UsageError(f"cannot displace {distance} vertices while keeping the counts {counts.tolist()}")
    tau = sigma.copy()
    tau[inside[:swaps]] = sigma[outside[:swaps]]
    tau[outside[:swaps]] = major
    return tau


def contraction_envelope(
    q: int,
    beta: float,
    selector: str,
    radius: float,
    n: int,
    initial_distance: int,
    replicas: int,
    seed: int,
    horizon_factor: float = 5.0,
    workers: int = 1,
) -> ExperimentTable:
    """
    Mean Hamming distance under the contracting coupling against
    (1 - (1 - theta)/(2N))^t d_0, for pairs started at the center of the ball.

    A replica counts only while both chains stay inside the 4r/5 ball; after the first exit
    it is dropped from every later checkpoint.
    """
    x = select_macrostate(selector, beta, q)
    region = RestrictedRegion(x, radius)
    outer = region.scaled(0.8)
    rate = theta(x, beta, q)
    p = ModelParams(q=q, beta=beta, n_vertices=n)
    center = nearest_counts(x, n)
    if not region.scaled(0.2).contains_counts(center):
        raise UsageError(f"the count vector nearest the center is outside the r/5 ball for N={n}")
    sigma = ChainState.from_counts(center, q).config
    tau = displaced_configuration(sigma, initial_distance, q)
    d0 = int(np.count_nonzero(sigma != tau))
    horizon = int(horizon_factor * n)
    checkpoints = sorted(set(np.linspace(0, horizon, CHECKPOINTS + 1).astype(int).tolist()))

    def one(replica: int) -> List[Optional[int]]:
        rng = make_stream(seed, replica, ENVELOPE_STREAM)
        cs = CoupledState.from_configs(sigma, tau, q)
        observed: List[Optional[int]] = []
        t = 0
        for checkpoint in checkpoints:
            while t < checkpoint:
                contracting_pair_step(cs, region, p, rng)
                t += 1
                if not (outer.contains_counts(cs.w.counts) and outer.contains_counts(cs.z.counts)):
                    return observed + [None] * (len(checkpoints) - len(observed))
            observed.append(cs.hamming_dist)
        return observed

    traces = _run_jobs(one, list(range(replicas)), workers)
    rows = []
    for i, checkpoint in enumerate(checkpoints):
        alive = [trace[i] for trace in traces if trace[i] is not None]
        mean = float(np.mean(alive)) if alive else None
        envelope = (1.0 - (1.0 - rate) / (2.0 * n)) ** checkpoint * d0
        rows.append({
            "t": checkpoint,
            "mean_hamming": mean,
            "envelope": envelope,
            "ratio": mean / envelope if mean is not None else None,
            "replicas": len(alive),
        })
    return ExperimentTable(
        name="contraction-envelope",
        columns=["t", "mean_hamming", "envelope", "ratio", "replicas"],
        rows=rows,
        summary={"theta": rate, "d0": d0},
    )
