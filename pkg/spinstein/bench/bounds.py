"""
Approximation bounds for the Potts model on bounded-degree graphs and their exact checks.

The contraction rate kappa = 1 - (1 - Delta tanh(beta/N)) / N controls every bound here;
anything that needs it raises DomainError when Delta tanh(beta/N) >= 1.
"""
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..errors import DomainError, UsageError
from ..exact import brute_force_gibbs, enumerate_configurations, enumerate_states, product_measure
from ..spin_core import Graph, ModelParams, check_prob_vector, softmax_gbeta, tv_distance

logger = logging.getLogger(__name__)

MC_BATCH = 1000


class LipschitzSpec(BaseModel):
    """Per-vertex Lipschitz constants L_v(h) of a named test function."""

    name: str
    constants: List[float]

    @field_validator("constants")
    @classmethod
    def nonnegative(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one Lipschitz constant is required")
        if any(c < 0 for c in value):
            raise ValueError("Lipschitz constants must be nonnegative")
        return value

    @property
    def max_constant(self) -> float:
        return max(self.constants)

    @classmethod
    def uniform(cls, n_vertices: int, value: float, name: str = "uniform") -> "LipschitzSpec":
        return cls(name=name, constants=[float(value)] * n_vertices)

    @classmethod
    def from_function(cls, name: str, fn: Callable[[np.ndarray], float], n_vertices: int, q: int) -> "LipschitzSpec":
        """
        Exact L_v(h) = max |h(sigma) - h(tau)| over pairs differing only at v, by enumeration.

        Only feasible for q^N up to about a million configurations.
        """
        configs = enumerate_configurations(n_vertices, q)
        values = np.array([fn(c) for c in configs], dtype=float)
        # vertex 0 is the least significant digit, i.e. the last axis in C order
        grid = values.reshape((q,) * n_vertices)
        constants = [float(np.ptp(grid, axis=n_vertices - 1 - v).max()) for v in range(n_vertices)]
        return cls(name=name, constants=constants)


class BoundReport(BaseModel):
    """A bound with the inputs it was computed from and its factors."""

    bound_value: float = Field(..., ge=0.0)
    inputs: Dict[str, Any]
    terms: Dict[str, float] = Field(default_factory=dict)


def _contraction_gap(g: Graph, p: ModelParams) -> float:
    """1 - Delta tanh(beta/N), checked to be positive."""
    n = g.n_vertices
    load = g.max_degree * math.tanh(p.beta / n)
    if load >= 1.0:
        raise DomainError(f"contraction needs Delta * tanh(beta/N) < 1, got {g.max_degree} * tanh({p.beta}/{n}) = {load:.6g}")
    return 1.0 - load


def contraction_rate_bounded_degree(g: Graph, p: ModelParams) -> float:
    """kappa = 1 - (1 - Delta tanh(beta/N)) / N."""
    return 1.0 - _contraction_gap(g, p) / g.n_vertices


def bounded_degree_bound(g: Graph, p: ModelParams, lipschitz: LipschitzSpec) -> BoundReport:
    """
    Bound on |E h(X) - E h(Y)| for the Potts model X against i.i.d. uniform spins Y.

    Reports ||L(h)|| beta sqrt(q-1) / (1 - Delta tanh(beta/N)) * sqrt(2|E|/N) as the bound
    and the tighter form with (1/N) sum_v sqrt(deg v) in place of sqrt(2|E|/N) as a term.
    """
    n = g.n_vertices
    gap = _contraction_gap(g, p)
    prefactor = lipschitz.max_constant * p.beta * math.sqrt(p.q - 1) / gap
    coarse_degree = math.sqrt(2.0 * g.edge_count / n)
    refined_degree = float(np.sqrt(g.degrees).sum()) / n
    report = BoundReport(
        bound_value=prefactor * coarse_degree,
        inputs={
            "beta": p.beta,
            "q": p.q,
            "N": n,
            "Delta": g.max_degree,
            "edges": g.edge_count,
            "kappa": 1.0 - gap / n,
            "lipschitz": lipschitz.name,
        },
        terms={
            "lipschitz_max": lipschitz.max_constant,
            "prefactor": prefactor,
            "sqrt_2E_over_N": coarse_degree,
            "mean_sqrt_degree": refined_degree,
            "degree_bound": prefactor * refined_degree,
        },
    )
    logger.debug("bounded-degree bound %.6g (refined %.6g)", report.bound_value, report.terms["degree_bound"])
    return report


def _vertex_marginals(x: np.ndarray, n_vertices: int, q: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return np.tile(check_prob_vector(x, q), (n_vertices, 1))
    if x.shape != (n_vertices, q):
        raise UsageError(f"per-vertex marginals must have shape ({n_vertices}, {q})")
    for row in x:
        check_prob_vector(row, q)
    return x


def _adjacency_matrix(g: Graph) -> np.ndarray:
    matrix = np.zeros((g.n_vertices, g.n_vertices))
    for v, row in enumerate(g.adjacency):
        matrix[v, row] = 1.0
    return matrix


class TNormEstimate(BaseModel):
    mean: float
    std_error: float
    analytic_bound: float
    samples: int


def mean_T_norm(
    g: Graph, p: ModelParams, x: Union[np.ndarray, List[float]], rng: np.random.Generator, samples: int = 10_000
) -> TNormEstimate:
    """
    Monte Carlo estimate of E ||T(Y)||_1 for Y with independent spins of law x.

    T_v(Y) is the TV distance between g_beta(S_v(Y)) and the law of Y(v). The analytic bound
    beta sqrt(q) sum_v sqrt(deg(v) / N^2 * sum_k x_k (1 - x_k)) assumes x solves the
    mean-field equations (for example x = e-hat).
    """
    n, q = g.n_vertices, p.q
    marginals = _vertex_marginals(np.asarray(x), n, q)
    adjacency = _adjacency_matrix(g)
    totals = []
    remaining = samples
    while remaining > 0:
        batch = min(MC_BATCH, remaining)
        uniforms = rng.random((batch, n, 1))
        colors = (uniforms > np.cumsum(marginals, axis=1)[None, :, :]).sum(axis=2)
        colors = np.minimum(colors, q - 1)
        one_hot = np.eye(q)[colors]
        s_v = np.einsum("vu,buk->bvk", adjacency, one_hot) / n
        z = 2.0 * p.beta * s_v
        z -= z.max(axis=2, keepdims=True)
        laws = np.exp(z)
        laws /= laws.sum(axis=2, keepdims=True)
        tv = 0.5 * np.abs(laws - marginals[None, :, :]).sum(axis=2)
        totals.append(tv.sum(axis=1))
        remaining -= batch
    values = np.concatenate(totals)
    spread = np.sqrt(g.degrees / float(n) ** 2 * np.sum(marginals * (1 - marginals), axis=1))
    return TNormEstimate(
        mean=float(values.mean()),
        std_error=float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0,
        analytic_bound=float(p.beta * math.sqrt(q) * spread.sum()),
        samples=int(values.size),
    )


def meanfield_residual(
    g: Graph, p: ModelParams, x: Union[np.ndarray, List[float]], self_inclusive: bool = False
) -> float:
    """
    max over v, k of |p_v^(k) - g_beta^(k)(E S_v(Y))| for product marginals p_v.

    With self_inclusive, E S_v also counts v itself, which is the complete-graph convention
    under which the ordered macrostates are exact fixed points.
    """
    n = g.n_vertices
    marginals = _vertex_marginals(np.asarray(x), n, p.q)
    adjacency = _adjacency_matrix(g)
    if self_inclusive:
        adjacency += np.eye(n)
    expected_s = adjacency @ marginals / n
    residual = 0.0
    for v in range(n):
        residual = max(residual, float(np.max(np.abs(marginals[v] - softmax_gbeta(expected_s[v], p.beta)))))
    return residual


def influence_bound(g: Graph, p: ModelParams, u: int, v: int) -> float:
    """
    Largest TV change in the conditional law at v caused by recoloring u.

    Maximised over the colors of v's other neighbours and over the pair of colors at u.
    Zero unless u and v are adjacent; never above tanh(beta/N).
    """
    n = g.n_vertices
    if u == v or u not in set(g.neighbors(v).tolist()):
        return 0.0
    q = p.q
    others = enumerate_states(int(g.degrees[v]) - 1, q)
    unit = np.eye(q) / n
    worst = 0.0
    for counts in others:
        base = counts / float(n)
        laws = [softmax_gbeta(base + unit[a], p.beta) for a in range(q)]
        for a in range(q):
            for b in range(a + 1, q):
                worst = max(worst, tv_distance(laws[a], laws[b]))
    return worst


def tmix_upper_bound_bounded_degree(g: Graph, p: ModelParams, epsilon: float = 0.25) -> float:
    """N log(N / epsilon) / (1 - Delta tanh(beta/N)), from contraction in Hamming distance."""
    if not 0.0 < epsilon < 1.0:
        raise UsageError(f"epsilon must lie in (0, 1), got {epsilon}")
    n = g.n_vertices
    return n * math.log(n / epsilon) / _contraction_gap(g, p)


def exact_expectation_gap(
    g: Graph, p: ModelParams, h: Callable[[np.ndarray], float], x: Optional[np.ndarray] = None
) -> float:
    """
    |E h(X) - E h(Y)| by enumeration, with X the Potts model on g and Y i.i.d. with law x
    (uniform by default).
    """
    x = np.full(p.q, 1.0 / p.q) if x is None else np.asarray(x, dtype=float)
    gibbs = brute_force_gibbs(g, p)
    product = product_measure(g.n_vertices, x)
    values = np.array([h(c) for c in gibbs.configs], dtype=float)
    return float(abs(gibbs.weights @ values - product.weights @ values))
