"""
The contracting coupling of two restricted complete-graph chains and the two-phase
coalescence scheme built on it.
"""
import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..dynamics import ChainState, RestrictedRegion, cwp_update_distribution, moved_counts, restricted_step
from ..errors import UsageError
from ..spin_core import ModelParams, hamming, make_stream
from .maximal import maximal_coupling_sample

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 10.0

PHASE_ONE_W = 1
PHASE_ONE_Z = 2
PHASE_TWO = 3


class CoupledState:
    """Two chains on the same vertex set with their Hamming distance kept up to date."""

    def __init__(self, w: ChainState, z: ChainState):
        if w.n_vertices != z.n_vertices or w.q != z.q:
            raise UsageError("coupled chains must share N and q")
        self.w = w
        self.z = z
        self.hamming_dist = hamming(w.config, z.config)

    @property
    def coalesced(self) -> bool:
        return self.hamming_dist == 0

    @property
    def n_vertices(self) -> int:
        return self.w.n_vertices

    @classmethod
    def from_configs(cls, sigma: np.ndarray, tau: np.ndarray, q: int) -> "CoupledState":
        return cls(ChainState(np.array(sigma, copy=True), q), ChainState(np.array(tau, copy=True), q))

    def __repr__(self) -> str:
        return f"CoupledState(t={self.w.step}, d_H={self.hamming_dist})"


def _accepts(state: ChainState, v: int, color: int, region: Optional[RestrictedRegion]) -> bool:
    old = int(state.config[v])
    if old == color or region is None:
        return True
    return region.contains_counts(moved_counts(state.counts, old, color))


def contracting_pair_step(
    cs: CoupledState, region: Optional[RestrictedRegion], p: ModelParams, rng: np.random.Generator
) -> CoupledState:
    """
    One step of the coupled restricted chains.

    Both chains update the same uniform vertex v. The new colors are a maximal coupling of
    g_beta(S(W) - e_{W(v)}/N) and g_beta(S(Z) - e_{Z(v)}/N), and each chain runs its own
    rejection test against the ball. With region None both chains are unrestricted.
    Once the chains agree everywhere the two laws coincide, so every later move is shared.

    Raises:
        UsageError if either chain is outside the region
    """
    if region is not None:
        for name, chain in (("W", cs.w), ("Z", cs.z)):
            if not region.contains_counts(chain.counts):
                raise UsageError(f"chain {name} is outside {region!r} at t={chain.step}")
    v = int(rng.integers(cs.n_vertices))
    before = cs.w.config[v] != cs.z.config[v]
    law_w = cwp_update_distribution(cs.w.counts, int(cs.w.config[v]), p.beta)
    law_z = law_w if cs.coalesced else cwp_update_distribution(cs.z.counts, int(cs.z.config[v]), p.beta)
    i, j = maximal_coupling_sample(law_w, law_z, rng)
    if _accepts(cs.w, v, i, region):
        cs.w.recolor(v, i)
    if _accepts(cs.z, v, j, region):
        cs.z.recolor(v, j)
    after = cs.w.config[v] != cs.z.config[v]
    cs.hamming_dist += int(after) - int(before)
    cs.w.step += 1
    cs.z.step += 1
    return cs


class CouplingTrace:
    """
    Record of one coupled run.

    Attributes:
        hammings: (t, d_H) pairs sampled every `record_every` steps, plus the final step
        tau_couple: first t with W_t = Z_t, None when max_steps ran out
        event_B_violated_at: first t <= gamma N log(N)^2 with a chain outside the 4r/5 ball
        phase1_len: steps spent in the independent phase
        max_hamming: largest d_H seen at any step of either phase
    """

    def __init__(self):
        self.hammings: List[Tuple[int, int]] = []
        self.tau_couple: Optional[int] = None
        self.event_B_violated_at: Optional[int] = None
        self.phase1_len = 0
        self.max_hamming = 0

    def note(self, t: int, distance: int) -> None:
        self.hammings.append((t, distance))
        self.max_hamming = max(self.max_hamming, distance)

    def to_record(self, replica: int) -> Dict[str, Any]:
        return {
            "replica": replica,
            "tau_couple": self.tau_couple,
            "phase1_len": self.phase1_len,
            "max_hamming": self.max_hamming,
            "event_B_violated_at": self.event_B_violated_at,
        }


def event_b_horizon(n_vertices: int, gamma: float = DEFAULT_GAMMA) -> int:
    return int(math.ceil(gamma * n_vertices * math.log(n_vertices) ** 2))


def two_phase_coalescence(
    sigma: np.ndarray,
    tau: np.ndarray,
    region: Optional[RestrictedRegion],
    p: ModelParams,
    seed: int,
    replica: int = 0,
    max_steps: int = 10 ** 7,
    record_every: int = 1,
    gamma: float = DEFAULT_GAMMA,
) -> CouplingTrace:
    """
    Run two restricted chains from sigma and tau until they coalesce.

    Phase one moves W and Z independently (substreams 1 and 2 of the replica) until both are
    inside the r/5 ball; phase two applies contracting_pair_step (substream 3). Without a
    region phase one is skipped.

    Raises:
        UsageError if a start lies outside the region
    """
    cs = CoupledState.from_configs(sigma, tau, p.q)
    trace = CouplingTrace()
    trace.note(0, cs.hamming_dist)
    if region is not None:
        for name, chain in (("sigma", cs.w), ("tau", cs.z)):
            if not region.contains_counts(chain.counts):
                raise UsageError(f"start {name} with counts {chain.counts.tolist()} is outside {region!r}")
    if cs.coalesced:
        trace.tau_couple = 0
        return trace

    horizon = event_b_horizon(p.n_vertices, gamma)
    outer = region.scaled(0.8) if region is not None else None
    record_every = max(1, int(record_every))
    t = 0

    def watch_event_b() -> None:
        if outer is None or trace.event_B_violated_at is not None or t > horizon:
            return
        if not (outer.contains_counts(cs.w.counts) and outer.contains_counts(cs.z.counts)):
            trace.event_B_violated_at = t

    watch_event_b()
    if region is not None:
        inner = region.scaled(0.2)
        rng_w = make_stream(seed, replica, PHASE_ONE_W)
        rng_z = make_stream(seed, replica, PHASE_ONE_Z)
        while t < max_steps and not (inner.contains_counts(cs.w.counts) and inner.contains_counts(cs.z.counts)):
            restricted_step(cs.w, region, p, rng_w)
            restricted_step(cs.z, region, p, rng_z)
            t += 1
            watch_event_b()
            distance = hamming(cs.w.config, cs.z.config)
            trace.max_hamming = max(trace.max_hamming, distance)
            if t % record_every == 0:
                trace.note(t, distance)
        trace.phase1_len = t
        cs.hamming_dist = hamming(cs.w.config, cs.z.config)
        logger.debug("replica %d: phase one ended at t=%d with d_H=%d", replica, t, cs.hamming_dist)

    rng = make_stream(seed, replica, PHASE_TWO)
    while t < max_steps and not cs.coalesced:
        contracting_pair_step(cs, region, p, rng)
        t += 1
        watch_event_b()
        trace.max_hamming = max(trace.max_hamming, cs.hamming_dist)
        if t % record_every == 0:
            trace.note(t, cs.hamming_dist)
    if cs.coalesced:
        trace.tau_couple = t
    if not trace.hammings or trace.hammings[-1][0] != t:
        trace.note(t, cs.hamming_dist)
    return trace
