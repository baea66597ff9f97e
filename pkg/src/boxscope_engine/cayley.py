"""
Boxscope Engine Cayley Graphs

Cayley graphs of quotient groups on {a, A, t, T} under right multiplication,
stored as a flat (V, 4) numpy array of neighbor indices (vertex x + N k).
Distances come from a vectorized frontier BFS; the diameter is the
eccentricity of the identity, since Cayley graphs are vertex-transitive.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO

import numpy as np

from boxscope_engine.models import DEFAULT_MAX_VERTICES, diameter_constant
from boxscope_engine.quotient import QuotientGroup
from boxscope_engine.validation import DomainError, InvariantViolation, ResourceCapError

logger = logging.getLogger(__name__)

EDGE_LABELS = ("a", "A", "t", "T")


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    """4-regular multigraph; adjacency[v, s] = v * generator s."""
    group: QuotientGroup
    adjacency: np.ndarray

    @property
    def vertex_count(self) -> int:
        return int(self.adjacency.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.size)

    def vertex_label(self, v: int) -> str:
        return str(self.group.element_at(v))

    def neighbors(self, v: int) -> dict[str, int]:
        return {label: int(w) for label, w in zip(EDGE_LABELS, self.adjacency[v])}


def _m_powers(Q: QuotientGroup) -> np.ndarray:
    """m^k mod N for k = 0 .. L-1 (period ord_m(N))."""
    period = np.empty(Q.order, dtype=np.int64)
    value = 1 % Q.N
    for k in range(Q.order):
        period[k] = value
        value = value * Q.m % Q.N
    return np.tile(period, Q.L // Q.order)


def build_graph(Q: QuotientGroup, max_vertices: int = DEFAULT_MAX_VERTICES) -> CayleyGraph:
    """
    Right-multiplication Cayley graph of Q.

    (x, k)a = (x + m^k, k), (x, k)A = (x - m^k, k),
    (x, k)t = (x, k + 1), (x, k)T = (x, k - 1).
    """
    size = Q.size
    if size > max_vertices:
        raise ResourceCapError(
            f"Cayley graph of {Q} needs {size} vertices, above the vertex cap {max_vertices}; "
            f"set --max-vertices to at least {size}",
            required=size,
            cap=max_vertices,
        )
    N, L = Q.N, Q.L
    idx = np.arange(size, dtype=np.int64)
    x = idx % N
    k = idx // N
    step = _m_powers(Q)[k]
    adjacency = np.empty((size, 4), dtype=np.int64)
    adjacency[:, 0] = (x + step) % N + N * k
    adjacency[:, 1] = (x - step) % N + N * k
    adjacency[:, 2] = x + N * ((k + 1) % L)
    adjacency[:, 3] = x + N * ((k - 1) % L)
    logger.debug("build_graph: %s with %d vertices", Q, size)
    return CayleyGraph(group=Q, adjacency=adjacency)


def bfs_distances(G: CayleyGraph, source: int = 0) -> np.ndarray:
    """Exact shortest-path distances from source; every vertex must be reached."""
    if not 0 <= source < G.vertex_count:
        raise DomainError(f"0 <= source < {G.vertex_count} required, got source = {source}")
    dist = np.full(G.vertex_count, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    depth = 0
    while frontier.size:
        reached = G.adjacency[frontier].ravel()
        reached = np.unique(reached[dist[reached] < 0])
        depth += 1
        dist[reached] = depth
        frontier = reached
    unreached = int(np.count_nonzero(dist < 0))
    if unreached:
        raise InvariantViolation(
            f"BFS on {G.group} left {unreached} of {G.vertex_count} vertices unreached"
        )
    return dist


def eccentricity(G: CayleyGraph, v: int) -> int:
    return int(bfs_distances(G, v).max())


def diameter(G: CayleyGraph, check_transitivity: bool = False, seed: Optional[int] = None) -> int:
    """
    Eccentricity of the identity vertex.

    With check_transitivity (or DEBUG logging) the eccentricity of one random
    vertex is compared against it.
    """
    ecc = eccentricity(G, 0)
    if check_transitivity or logger.isEnabledFor(logging.DEBUG):
        v = random.Random(seed).randrange(G.vertex_count)
        other = eccentricity(G, v)
        if other != ecc:
            raise InvariantViolation(
                f"eccentricity {other} of vertex {v} differs from identity eccentricity {ecc}"
            )
    return ecc


def diameter_bounds(m: int, order: int) -> tuple[float, float]:
    """(ord / 3, C_m ord) with C_m = 2m(2 + ln m)."""
    return order / 3, diameter_constant(m) * order


def within_bounds(m: int, order: int, diam: int) -> bool:
    low, high = diameter_bounds(m, order)
    return low <= diam <= high


def export_dot(G: CayleyGraph, sink: TextIO, name: Optional[str] = None) -> None:
    """
    Write G as a DOT digraph.

    Vertices are labelled "x,k"; edges are listed by source index, then in
    generator order a, A, t, T, so repeated exports are byte-identical.
    """
    Q = G.group
    graph_name = name or f"Q_{Q.m}_{Q.N}_{Q.L}"
    sink.write(f"digraph {graph_name} {{\n")
    for v in range(G.vertex_count):
        sink.write(f'  {v} [label="{G.vertex_label(v)}"];\n')
    for v in range(G.vertex_count):
        for label, w in zip(EDGE_LABELS, G.adjacency[v]):
            sink.write(f'  {v} -> {int(w)} [label="{label}"];\n')
    sink.write("}\n")


def write_dot_file(G: CayleyGraph, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        export_dot(G, fh)
    return path


def distance_rows(G: CayleyGraph, source: int = 0) -> list[tuple[int, int, int, int]]:
    """(vertex_index, x, k, distance) for every vertex."""
    dist = bfs_distances(G, source)
    N = G.group.N
    return [(v, v % N, v // N, int(d)) for v, d in enumerate(dist)]

