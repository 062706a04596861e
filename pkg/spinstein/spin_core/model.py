"""
Core value types: model parameters, graphs, configurations and simplex vectors.

Colors are 0-based everywhere in memory; files and the CLI use 1-based colors.
"""
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import UsageError

logger = logging.getLogger(__name__)

PROB_TOLERANCE = 1e-12


class ModelParams(BaseModel):
    """Parameters of a Potts model: color count, inverse temperature and size."""

    model_config = ConfigDict(frozen=True)

    q: int = Field(..., ge=3, description="number of colors")
    beta: float = Field(..., ge=0.0, description="inverse temperature")
    n_vertices: int = Field(..., ge=1, description="number of vertices N")


class Graph:
    """
    Undirected simple graph stored as per-vertex neighbor arrays.

    Vertices are 0..N-1. Isolated vertices and an empty edge set are allowed.
    """

    def __init__(self, n_vertices: int, adjacency: Sequence[Sequence[int]]):
        if n_vertices < 1:
            raise UsageError("a graph needs at least one vertex")
        if len(adjacency) != n_vertices:
            raise UsageError(f"adjacency has {len(adjacency)} rows for {n_vertices} vertices")
        self.n_vertices = int(n_vertices)
        self.adjacency: List[np.ndarray] = [
            np.asarray(sorted(set(int(u) for u in row)), dtype=np.int64) for row in adjacency
        ]
        self._validate()
        self.degrees = np.array([len(row) for row in self.adjacency], dtype=np.int64)
        self.max_degree = int(self.degrees.max()) if n_vertices else 0
        self.edge_count = int(self.degrees.sum()) // 2

    def _validate(self) -> None:
        neighbor_sets = [set(row.tolist()) for row in self.adjacency]
        for v, row in enumerate(neighbor_sets):
            if v in row:
                raise UsageError(f"self-loop at vertex {v + 1}")
            for u in row:
                if u < 0 or u >= self.n_vertices:
                    raise UsageError(f"vertex {v + 1} lists out-of-range neighbor {u + 1}")
                if v not in neighbor_sets[u]:
                    raise UsageError(f"adjacency is not symmetric between {u + 1} and {v + 1}")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        """Build a graph from 0-based edge pairs; duplicate edges collapse."""
        rows: List[List[int]] = [[] for _ in range(n_vertices)]
        for u, v in edges:
            if u == v:
                raise UsageError(f"self-loop at vertex {u + 1}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise UsageError(f"edge ({u + 1}, {v + 1}) out of range for N={n_vertices}")
            rows[u].append(v)
            rows[v].append(u)
        return cls(n_vertices, rows)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "Graph":
        """Convert a networkx graph, relabelling its nodes to 0..N-1 in sorted order."""
        nodes = sorted(graph.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        edges = [(index[u], index[v]) for u, v in graph.edges() if u != v]
        return cls.from_edges(len(nodes), edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_vertices))
        graph.add_edges_from(self.edges())
        return graph

    def edges(self) -> List[Tuple[int, int]]:
        """Edges as sorted 0-based pairs (u < v)."""
        return [(v, int(u)) for v, row in enumerate(self.adjacency) for u in row if v < u]

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[v]

    def is_complete(self) -> bool:
        return self.edge_count == self.n_vertices * (self.n_vertices - 1) // 2

    def __repr__(self) -> str:
        return f"Graph(N={self.n_vertices}, |E|={self.edge_count}, max_degree={self.max_degree})"


def as_configuration(colors: Sequence[int], q: int, n_vertices: Optional[int] = None) -> np.ndarray:
    """
    Validate and copy a 0-based coloring into an int64 array.

    Args:
        colors: color of each vertex, in 0..q-1
        q: number of colors
        n_vertices: expected length, if known

    Returns:
        A fresh configuration array
    """
    config = np.array(colors, dtype=np.int64).reshape(-1)
    if n_vertices is not None and config.size != n_vertices:
        raise UsageError(f"configuration has length {config.size}, expected {n_vertices}")
    if config.size and (config.min() < 0 or config.max() >= q):
        raise UsageError(f"configuration colors must lie in 1..{q}")
    return config


def from_one_based(colors: Sequence[int], q: int, n_vertices: Optional[int] = None) -> np.ndarray:
    """Convert 1-based I/O colors to an internal configuration."""
    return as_configuration(np.asarray(colors, dtype=np.int64) - 1, q, n_vertices=n_vertices)


def to_one_based(config: np.ndarray) -> List[int]:
    return (np.asarray(config, dtype=np.int64) + 1).tolist()


def check_prob_vector(probs: Sequence[float], q: Optional[int] = None) -> np.ndarray:
    """Validate a probability vector on the simplex (entries >= 0, sum 1 within 1e-12)."""
    vec = np.asarray(probs, dtype=float).reshape(-1)
    if q is not None and vec.size != q:
        raise UsageError(f"probability vector has {vec.size} entries, expected {q}")
    if np.any(vec < -PROB_TOLERANCE) or abs(vec.sum() - 1.0) > 1e-9:
        raise UsageError(f"not a probability vector: {vec.tolist()}")
    return np.clip(vec, 0.0, None)


def uniform_vector(q: int) -> np.ndarray:
    """The equiproportionality vector e-hat."""
    return np.full(q, 1.0 / q)
