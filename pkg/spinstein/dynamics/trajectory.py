"""
Trajectory runner with stopping-time and rejection instrumentation.
"""
import logging
from typing import Any, Dict, List, Optional

import numpy as np

from ..errors import UsageError
from ..spin_core import Graph, ModelParams
from .glauber import cwp_glauber_step, glauber_step, restricted_step
from .state import ChainState, RestrictedRegion, StoppingTimes

logger = logging.getLogger(__name__)

PATH_POINTS = 10 ** 6


class TrajectorySummary:
    """Outcome of run_trajectory: final state, stopping times, rejections and the sampled path."""

    def __init__(self, final_state: ChainState, stopping_times: StoppingTimes, rejections: int, stride: int):
        self.final_state = final_state
        self.stopping_times = stopping_times
        self.rejections = rejections
        self.stride = stride
        self.path: List[Dict[str, Any]] = []

    def record(self, state: ChainState, rejected_cum: int) -> None:
        self.path.append({"step": state.step, "counts": state.counts.copy(), "rejected_cum": rejected_cum})

    def to_records(self) -> List[Dict[str, Any]]:
        """Rows with columns step, counts_1..counts_q, rejected_cum, tau_out, tau_in."""
        rows = []
        for point in self.path:
            row: Dict[str, Any] = {"step": point["step"]}
            for k, count in enumerate(point["counts"].tolist()):
                row[f"counts_{k + 1}"] = count
            row["rejected_cum"] = point["rejected_cum"]
            row["tau_out"] = self.stopping_times.tau_out
            row["tau_in"] = self.stopping_times.tau_in
            rows.append(row)
        return rows


def default_stride(steps: int) -> int:
    return max(1, steps // PATH_POINTS)


def run_trajectory(
    initial: ChainState,
    steps: int,
    p: ModelParams,
    rng: np.random.Generator,
    region: Optional[RestrictedRegion] = None,
    graph: Optional[Graph] = None,
    record_path: bool = True,
    stride: Optional[int] = None,
    stop_at: Optional[str] = None,
) -> TrajectorySummary:
    """
    Run a chain for a number of steps.

    Args:
        initial: starting state; it is copied, not mutated
        steps: number of updates
        p: model parameters
        rng: random stream
        region: restriction ball; also the reference ball for tau_out (radius 4r/5) and
            tau_in (radius r/5). Without a region no stopping times are recorded
        graph: general graph; None runs the complete-graph count dynamics
        record_path: keep the count vector every `stride` steps
        stride: subsampling stride, default max(1, steps / 10^6)
        stop_at: "tau_out" or "tau_in" to stop as soon as that time is observed

    Returns:
        TrajectorySummary
    """
    if steps < 0:
        raise UsageError("steps must be nonnegative")
    if stop_at not in (None, "tau_out", "tau_in"):
        raise UsageError(f"unknown stopping time '{stop_at}'")
    state = initial.copy()
    stride = stride or default_stride(steps)
    times = StoppingTimes()
    summary = TrajectorySummary(state, times, 0, stride)

    outer = inner = None
    if region is not None:
        if not region.contains_counts(state.counts):
            raise UsageError(f"initial state {state.counts.tolist()} is outside {region!r}")
        outer, inner = region.scaled(0.8), region.scaled(0.2)

    def observe() -> bool:
        if outer is None:
            return False
        if times.tau_out is None and not outer.contains_counts(state.counts):
            times.tau_out = state.step - initial.step
        if times.tau_in is None and inner.contains_counts(state.counts):
            times.tau_in = state.step - initial.step
        return stop_at is not None and getattr(times, stop_at) is not None

    if record_path:
        summary.record(state, 0)
    done = observe()
    for _ in range(steps):
        if done:
            break
        if region is not None:
            _, rejected = restricted_step(state, region, p, rng, graph=graph)
            summary.rejections += int(rejected)
        elif graph is not None:
            glauber_step(graph, state, p, rng)
        else:
            cwp_glauber_step(state, p, rng)
        done = observe()
        if record_path and (state.step - initial.step) % stride == 0:
            summary.record(state, summary.rejections)
    logger.debug(
        "trajectory finished at t=%d with %d rejections, tau_out=%s, tau_in=%s",
        state.step, summary.rejections, times.tau_out, times.tau_in,
    )
    return summary
