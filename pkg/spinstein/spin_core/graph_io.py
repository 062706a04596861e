"""
Graph builders and the plain-text graph / configuration file formats.

Graph file: first line "N M", then M lines "u v" with 1-based vertices.
Configuration file: one line of N space-separated 1-based colors.
"""
import logging
from pathlib import Path
from typing import List, Optional, Union

import networkx as nx
import numpy as np

from ..errors import OutputError, UsageError
from .model import Graph, from_one_based, to_one_based

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def complete_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.complete_graph(n))


def cycle_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.cycle_graph(n))


def path_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.path_graph(n))


def empty_graph(n: int) -> Graph:
    return Graph.from_networkx(nx.empty_graph(n))


def random_regular_graph(degree: int, n: int, seed: Optional[int] = None) -> Graph:
    return Graph.from_networkx(nx.random_regular_graph(degree, n, seed=seed))


def erdos_renyi_graph(n: int, p: float, seed: Optional[int] = None) -> Graph:
    return Graph.from_networkx(nx.gnp_random_graph(n, p, seed=seed))


def build_graph(kind: str, n: int, degree: int = 4, edge_prob: float = 0.1, seed: Optional[int] = None) -> Graph:
    """
    Build a named graph family.

    Args:
        kind: one of complete, cycle, path, empty, regular, gnp
        n: number of vertices
        degree: degree for the random regular family
        edge_prob: edge probability for the Erdos-Renyi family
        seed: seed for the random families

    Returns:
        The graph
    """
    builders = {
        "complete": lambda: complete_graph(n),
        "cycle": lambda: cycle_graph(n),
        "path": lambda: path_graph(n),
        "empty": lambda: empty_graph(n),
        "regular": lambda: random_regular_graph(degree, n, seed=seed),
        "gnp": lambda: erdos_renyi_graph(n, edge_prob, seed=seed),
    }
    if kind not in builders:
        raise UsageError(f"unknown graph family '{kind}', expected one of {sorted(builders)}")
    try:
        return builders[kind]()
    except (nx.NetworkXError, ValueError) as e:
        raise UsageError(f"cannot build {kind} graph on {n} vertices: {e}")


def read_graph(path: PathLike) -> Graph:
    """Read a graph file ("N M" header then M 1-based edge lines)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read graph file {path}: {e}")
    lines = [(lineno, line.split()) for lineno, line in enumerate(text.splitlines(), start=1) if line.strip()]
    parsed = []
    for lineno, fields in lines:
        try:
            if len(fields) != 2:
                raise ValueError(f"expected two integers, got {len(fields)} fields")
            parsed.append((int(fields[0]), int(fields[1])))
        except ValueError as e:
            raise UsageError(f"graph file {path}:{lineno}: {e}")
    if not parsed:
        raise UsageError(f"graph file {path} must start with a 'N M' line")
    (n, m), edge_lines = parsed[0], parsed[1:]
    if len(edge_lines) != m:
        raise UsageError(f"graph file {path} declares {m} edges but lists {len(edge_lines)}")
    for (lineno, _), (u, v) in zip(lines[1:], edge_lines):
        if not (1 <= u <= n and 1 <= v <= n):
            raise UsageError(f"graph file {path}:{lineno}: edge {u} {v} leaves the vertex range 1..{n}")
    graph = Graph.from_edges(n, [(u - 1, v - 1) for u, v in edge_lines])
    logger.debug("Loaded %r from %s", graph, path)
    return graph


def write_graph(graph: Graph, path: PathLike) -> None:
    edges = graph.edges()
    body = [f"{graph.n_vertices} {len(edges)}"] + [f"{u + 1} {v + 1}" for u, v in edges]
    try:
        Path(path).write_text("\n".join(body) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write graph file {path}: {e}")


def read_configuration(path: PathLike, q: int, n_vertices: Optional[int] = None) -> np.ndarray:
    """Read a configuration file of 1-based colors, optionally checking its length."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read configuration file {path}: {e}")
    colors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for token in line.split():
            try:
                colors.append(int(token))
            except ValueError:
                raise UsageError(f"configuration file {path}:{lineno}: '{token}' is not an integer color")
    return from_one_based(colors, q, n_vertices=n_vertices)


def write_configuration(config: np.ndarray, path: PathLike) -> None:
    colors: List[int] = to_one_based(config)
    try:
        Path(path).write_text(" ".join(str(c) for c in colors) + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(f"cannot write configuration file {path}: {e}")
