"""
Unit Tests for Boxscope Cayley Graphs

Adjacency construction, BFS distances, diameters and their envelope, the
vertex cap, and deterministic DOT export.
"""
import io
from collections import Counter, deque
from math import gcd

import pytest

from boxscope_engine.cayley import (
    EDGE_LABELS,
    bfs_distances,
    build_graph,
    diameter,
    diameter_bounds,
    distance_rows,
    export_dot,
    within_bounds,
    write_dot_file,
)
from boxscope_engine.quotient import build_covering_quotient, build_quotient, q_mul
from boxscope_engine.validation import DomainError, ResourceCapError


# ============================================================================
# Test fixtures
# ============================================================================

@pytest.fixture
def g25():
    """Cayley graph of G_2 / G_2(5)."""
    return build_graph(build_quotient(2, 5))


def plain_bfs(G, source=0):
    """Queue-based BFS used as a reference."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in G.adjacency[v]:
            w = int(w)
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return [dist[v] for v in range(G.vertex_count)]


# ============================================================================
# Construction
# ============================================================================

class TestBuildGraph:
    def test_shape(self, g25):
        """20 vertices, 4 out-edges each."""
        assert g25.vertex_count == 20
        assert g25.edge_count == 80
        assert g25.adjacency.shape == (20, 4)

    def test_edges_are_right_multiplication(self, g25):
        """adjacency[v, s] is the index of v * s."""
        Q = g25.group
        gens = Q.generators()
        for u in Q.elements():
            for s, label in enumerate(EDGE_LABELS):
                assert g25.adjacency[Q.index(u), s] == Q.index(q_mul(Q, u, gens[label]))

    def test_neighbors(self, g25):
        """Identity neighbors are the generator images."""
        assert g25.neighbors(0) == {"a": 1, "A": 4, "t": 5, "T": 15}
        assert g25.vertex_label(7) == "2,1"

    def test_covering_graph(self):
        """Covering quotients repeat the m-power period."""
        G = build_graph(build_covering_quotient(2, 3, 6))
        assert G.vertex_count == 18
        Q = G.group
        gens = Q.generators()
        for u in Q.elements():
            assert G.adjacency[Q.index(u), 0] == Q.index(q_mul(Q, u, gens["a"]))

    def test_vertex_cap(self):
        """Groups above the cap raise ResourceCapError."""
        with pytest.raises(ResourceCapError, match="--max-vertices") as excinfo:
            build_graph(build_quotient(2, 5), max_vertices=19)
        assert excinfo.value.required == 20
        assert excinfo.value.cap == 19


# ============================================================================
# Distances
# ============================================================================

class TestDistances:
    def test_worked_diameter(self, g25):
        """diameter(G_2 / G_2(5)) = 3."""
        assert diameter(g25) == 3
        assert diameter(g25, check_transitivity=True, seed=1) == 3

    def test_distance_profile(self, g25):
        """1, 4, 11, 4 vertices at distance 0..3."""
        assert Counter(bfs_distances(g25).tolist()) == {0: 1, 1: 4, 2: 11, 3: 4}

    @pytest.mark.parametrize("m,N", [(2, 7), (2, 9), (3, 4), (3, 10), (5, 13), (10, 21)])
    def test_matches_queue_bfs(self, m, N):
        """Frontier BFS equals a plain queue BFS."""
        G = build_graph(build_quotient(m, N))
        assert bfs_distances(G).tolist() == plain_bfs(G)

    def test_vertex_transitive(self):
        """Every vertex has the same eccentricity."""
        G = build_graph(build_quotient(3, 8))
        ecc = {int(bfs_distances(G, v).max()) for v in range(G.vertex_count)}
        assert len(ecc) == 1

    def test_bad_source(self, g25):
        """Source must be a vertex."""
        with pytest.raises(DomainError):
            bfs_distances(g25, 20)

    def test_distance_rows(self, g25):
        """(vertex_index, x, k, distance) rows."""
        rows = distance_rows(g25)
        assert len(rows) == 20
        assert rows[0] == (0, 0, 0, 0)
        assert rows[12] == (12, 2, 2, 3)

    def test_trivial_group(self):
        """N = 1 has diameter 0."""
        assert diameter(build_graph(build_quotient(2, 1))) == 0


class TestDiameterBounds:
    def test_worked_bounds(self):
        """(4/3, 16(2 + ln 2) 4 / 4)."""
        low, high = diameter_bounds(2, 4)
        assert low == pytest.approx(4 / 3)
        assert high == pytest.approx(43.0904, abs=1e-4)

    @pytest.mark.parametrize("m", [2, 3])
    def test_small_quotients_within_bounds(self, m):
        """Every nontrivial quotient with N <= 60 respects the envelope."""
        for N in range(2, 61):
            if gcd(m, N) != 1:
                continue
            Q = build_quotient(m, N)
            assert within_bounds(m, Q.order, diameter(build_graph(Q))), N


# ============================================================================
# DOT export
# ============================================================================

class TestExportDot:
    def test_format(self, g25):
        """Header, labelled vertices and labelled edges in generator order."""
        buf = io.StringIO()
        export_dot(g25, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "digraph Q_2_5_4 {"
        assert lines[1] == '  0 [label="0,0"];'
        assert lines[21] == '  0 -> 1 [label="a"];'
        assert lines[22] == '  0 -> 4 [label="A"];'
        assert lines[-1] == "}"
        assert len(lines) == 1 + 20 + 80 + 1

    def test_deterministic(self, g25, tmp_path):
        """Two exports are byte-identical."""
        first = write_dot_file(g25, tmp_path / "a.dot").read_bytes()
        second = write_dot_file(build_graph(build_quotient(2, 5)), tmp_path / "b.dot").read_bytes()
        assert first == second
        assert b"\r\n" not in first
