"""
Observables of configurations: Hamming distance, color counts, neighbor proportions,
monochromatic edge count and total variation distance.
"""
import numpy as np

from ..errors import UsageError
from .model import Graph


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    """Number of vertices at which two configurations disagree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise UsageError(f"cannot compare configurations of lengths {a.size} and {b.size}")
    return int(np.count_nonzero(a != b))


def proportions(config: np.ndarray, q: int) -> np.ndarray:
    """
    Count vector of a configuration.

    Args:
        config: 0-based coloring of N vertices
        q: number of colors

    Returns:
        int64 array n with n[k] = #{v : config[v] = k}; divide by N for S(config)
    """
    return np.bincount(np.asarray(config, dtype=np.int64), minlength=q).astype(np.int64)


def neighbor_proportions(g: Graph, config: np.ndarray, v: int, q: int) -> np.ndarray:
    """
    Scaled neighbor color proportions S_v(config) = (1/N) * (neighbor counts by color).

    The vertex v itself is excluded; entries sum to deg(v)/N.
    """
    if not 0 <= v < g.n_vertices:
        raise UsageError(f"vertex {v + 1} is out of range for N={g.n_vertices}")
    nbrs = g.neighbors(v)
    if nbrs.size == 0:
        return np.zeros(q)
    counts = np.bincount(np.asarray(config)[nbrs], minlength=q)
    return counts.astype(float) / g.n_vertices


def edge_energy(g: Graph, config: np.ndarray) -> int:
    """Number of monochromatic edges."""
    config = np.asarray(config)
    total = 0
    for v, row in enumerate(g.adjacency):
        if row.size:
            total += int(np.count_nonzero(config[row] == config[v]))
    return total // 2


def complete_graph_energy(counts: np.ndarray) -> int:
    """Monochromatic edges of K_N from its count vector: sum_k n_k (n_k - 1) / 2."""
    counts = np.asarray(counts, dtype=np.int64)
    return int(np.sum(counts * (counts - 1)) // 2)


def tv_distance(p: np.ndarray, r: np.ndarray) -> float:
    """Total variation distance 1/2 ||p - r||_1, clipped to [0, 1]."""
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if p.shape != r.shape:
        raise UsageError("probability vectors must have the same length")
    value = 0.5 * float(np.abs(p - r).sum())
    return min(max(value, 0.0), 1.0)
