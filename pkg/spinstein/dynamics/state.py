"""
Chain state, the l2 ball used by the restricted dynamics, and stopping-time records.
"""
import logging
import math
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from ..errors import UsageError
from ..spin_core import as_configuration, check_prob_vector, proportions

logger = logging.getLogger(__name__)

# float comparisons are biased toward acceptance by this much
BOUNDARY_SLACK = 1e-12
MAX_DENOMINATOR = 1000


def _rational_center(center: np.ndarray) -> Optional[List[Fraction]]:
    """Exact rational form of the center when every entry has a small denominator."""
    fractions = [Fraction(float(c)).limit_denominator(MAX_DENOMINATOR) for c in center]
    if sum(fractions) != 1:
        return None
    if any(abs(float(f) - float(c)) > 1e-15 for f, c in zip(fractions, center)):
        return None
    return fractions


class RestrictedRegion:
    """
    The set of configurations whose proportions vector lies within l2 distance r of x.

    Membership is decided on count vectors. When x has rational entries (always the case
    for e-hat) the test ||n - N x||^2 <= (N r)^2 is evaluated in exact arithmetic;
    otherwise a float test with a 1e-12 slack is used.
    """

    def __init__(self, center: np.ndarray, radius: float):
        if not radius > 0:
            raise UsageError(f"restriction radius must be positive, got {radius}")
        self.center = check_prob_vector(center)
        self.radius = float(radius)
        self._exact_center = _rational_center(self.center)
        radius_sq = Fraction(self.radius) ** 2
        self._radius_sq_num, self._radius_sq_den = radius_sq.numerator, radius_sq.denominator
        if self._exact_center is not None:
            self._denominator = math.lcm(*(f.denominator for f in self._exact_center))
            self._numerators = [int(f * self._denominator) for f in self._exact_center]

    @property
    def q(self) -> int:
        return int(self.center.size)

    @property
    def is_exact(self) -> bool:
        return self._exact_center is not None

    def scaled(self, factor: float) -> "RestrictedRegion":
        """Concentric ball with radius multiplied by factor (4/5 and 1/5 for the stopping times)."""
        return RestrictedRegion(self.center, self.radius * factor)

    def distance(self, counts: np.ndarray) -> float:
        counts = np.asarray(counts, dtype=float)
        return float(np.linalg.norm(counts / counts.sum() - self.center))

    def contains_counts(self, counts: np.ndarray) -> bool:
        counts = np.asarray(counts, dtype=np.int64)
        n = int(counts.sum())
        if self._exact_center is not None:
            d = self._denominator
            gap = sum((d * int(c) - n * m) ** 2 for c, m in zip(counts, self._numerators))
            return gap * self._radius_sq_den <= self._radius_sq_num * (n * d) ** 2
        return self.distance(counts) <= self.radius + BOUNDARY_SLACK

    def contains(self, config: np.ndarray) -> bool:
        return self.contains_counts(proportions(config, self.q))

    def to_dict(self) -> Dict[str, Any]:
        return {"center": self.center.tolist(), "radius": self.radius}

    def __repr__(self) -> str:
        return f"RestrictedRegion(center={np.round(self.center, 6).tolist()}, radius={self.radius})"


class StoppingTimes(BaseModel):
    """First exit from the 4r/5 ball and first entry into the r/5 ball."""

    tau_out: Optional[int] = None
    tau_in: Optional[int] = None


class ChainState:
    """
    A configuration with its incrementally maintained count vector and time index.

    Steps mutate the state in place; use copy() to branch a chain.
    """

    def __init__(self, config: np.ndarray, q: int, step: int = 0):
        self.config = as_configuration(config, q)
        self.q = q
        self.counts = proportions(self.config, q)
        self.step = step

    @property
    def n_vertices(self) -> int:
        return int(self.config.size)

    def proportions(self) -> np.ndarray:
        return self.counts / float(self.n_vertices)

    def recolor(self, v: int, color: int) -> None:
        old = int(self.config[v])
        if old != color:
            self.counts[old] -= 1
            self.counts[color] += 1
            self.config[v] = color

    def counts_consistent(self) -> bool:
        return bool(np.array_equal(self.counts, proportions(self.config, self.q)))

    def copy(self) -> "ChainState":
        clone = ChainState.__new__(ChainState)
        clone.config = self.config.copy()
        clone.q = self.q
        clone.counts = self.counts.copy()
        clone.step = self.step
        return clone

    @classmethod
    def from_counts(cls, counts: np.ndarray, q: int, rng: Optional[np.random.Generator] = None) -> "ChainState":
        """
        A configuration realising the given count vector.

        Colors are laid out in blocks; with rng the vertex order is shuffled.
        """
        counts = np.asarray(counts, dtype=np.int64)
        if counts.size != q or np.any(counts < 0):
            raise UsageError(f"count vector must have {q} nonnegative entries")
        config = np.repeat(np.arange(q, dtype=np.int64), counts)
        if rng is not None:
            rng.shuffle(config)
        return cls(config, q)

    def __repr__(self) -> str:
        return f"ChainState(t={self.step}, counts={self.counts.tolist()})"


def nearest_counts(x: np.ndarray, n_vertices: int) -> np.ndarray:
    """Integer count vector summing to N closest to N x (largest-remainder rounding)."""
    target = np.asarray(x, dtype=float) * n_vertices
    counts = np.floor(target).astype(np.int64)
    missing = n_vertices - int(counts.sum())
    order = np.argsort(-(target - counts), kind="stable")
    counts[order[:missing]] += 1
    return counts


def ball_extreme_counts(region: RestrictedRegion, n_vertices: int) -> List[np.ndarray]:
    """
    Count vectors near the ball boundary along each direction e_k - e_hat and its opposite.

    Each candidate is pulled back toward the center until it lies inside the region.
    """
    q = region.q
    extremes: List[np.ndarray] = []
    for k in range(q):
        direction = -np.full(q, 1.0 / (q - 1))
        direction[k] = 1.0
        direction /= np.linalg.norm(direction)
        for sign in (1.0, -1.0):
            scale = region.radius
            while scale > 0:
                point = region.center + sign * scale * direction
                if np.all(point >= 0):
                    counts = nearest_counts(point, n_vertices)
                    if region.contains_counts(counts):
                        extremes.append(counts)
                        break
                scale -= region.radius / 50.0
            else:
                logger.debug("no interior count vector along direction %d (%+.0f)", k, sign)
    center_counts = nearest_counts(region.center, n_vertices)
    if not extremes and region.contains_counts(center_counts):
        extremes.append(center_counts)
    return extremes
