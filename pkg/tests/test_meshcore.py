import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdrmesh.meshcore import (
    Adjacency,
    Mesh,
    MeshError,
    QualityDomainError,
    build_adjacency,
    classify_boundary,
    global_quality,
    triangle_quality,
    vertex_qualities,
    vertex_quality,
)
from rdrmesh.meshio import generate_synthetic


class TestAdjacency:
    def test_single_triangle(self, equilateral):
        adj = build_adjacency(equilateral)
        assert [adj.neighbors(i).tolist() for i in range(3)] == [[1, 2], [0, 2], [0, 1]]
        assert [adj.attached(i).tolist() for i in range(3)] == [[0], [0], [0]]

    def test_shared_edge(self):
        m = Mesh(np.zeros((4, 2)) + np.arange(4)[:, None] * [1.0, 0.3], [[0, 1, 2], [1, 2, 3]])
        adj = build_adjacency(m)
        assert adj.neighbors(1).tolist() == [0, 2, 3]
        assert adj.attached(2).tolist() == [0, 1]

    def test_no_triangles(self):
        m = Mesh(np.zeros((3, 2)), np.zeros((0, 3)))
        adj = build_adjacency(m)
        assert all(len(adj.neighbors(i)) == 0 for i in range(3))

    def test_out_of_range_rejected(self):
        with pytest.raises(MeshError):
            Mesh(np.zeros((3, 2)), [[0, 1, 3]])
        with pytest.raises(MeshError):
            Mesh(np.zeros((3, 2)), [[0, 1, 1]])

    def test_non_finite_rejected(self):
        with pytest.raises(MeshError):
            Mesh([[0.0, np.nan], [1, 0], [0, 1]], [[0, 1, 2]])

    @pytest.mark.parametrize("rows,cols,jitter,seed", [(3, 3, 0.0, 0), (7, 11, 0.3, 5), (20, 13, 0.1, 9)])
    def test_symmetric_and_matches_edges(self, rows, cols, jitter, seed):
        m = generate_synthetic(rows, cols, jitter, seed)
        adj = build_adjacency(m)
        expected = [set() for _ in range(m.n_vertices)]
        for a, b, c in m.triangles.tolist():
            for u, v in ((a, b), (b, c), (c, a)):
                expected[u].add(v)
                expected[v].add(u)
        for i in range(m.n_vertices):
            nb = adj.neighbors(i).tolist()
            assert nb == sorted(expected[i])
            assert i not in nb
            for j in nb:
                assert i in adj.neighbors(j)

    def test_from_lists(self):
        adj = Adjacency.from_lists([[2, 1], [0], [0]])
        assert adj.neighbors(0).tolist() == [1, 2]


class TestBoundary:
    def test_single_triangle(self, equilateral):
        assert classify_boundary(equilateral).all()

    def test_fan(self, hexagon_fan):
        assert classify_boundary(hexagon_fan).tolist() == [False] + [True] * 6

    def test_two_triangles(self):
        m = Mesh([[0, 0], [1, 0], [0, 1], [1, 1]], [[0, 1, 2], [1, 3, 2]])
        assert classify_boundary(m).all()

    def test_grid_interior_count(self):
        m = generate_synthetic(6, 5, 0.0, 0)
        assert (~classify_boundary(m)).sum() == 4 * 3


class TestQuality:
    def test_equilateral(self):
        assert triangle_quality((0, 0), (1, 0), (0.5, math.sqrt(3) / 2)) == pytest.approx(1.0, abs=1e-15)

    def test_right_isoceles(self):
        assert triangle_quality((0, 0), (1, 0), (0, 1)) == pytest.approx(1 / math.sqrt(2), rel=1e-15)

    def test_two_by_one(self):
        assert triangle_quality((0, 0), (2, 0), (0, 1)) == pytest.approx(1 / math.sqrt(5), rel=1e-15)

    def test_degenerate(self):
        assert triangle_quality((0, 0), (0, 0), (1, 1)) == 0.0
        with pytest.raises(QualityDomainError):
            triangle_quality((1, 1), (1, 1), (1, 1))

    @settings(max_examples=200, deadline=None)
    @given(
        pts=st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=3, max_size=3),
        angle=st.floats(0, 2 * math.pi),
        scale=st.floats(0.01, 100),
        shift=st.tuples(st.floats(-50, 50), st.floats(-50, 50)),
    )
    def test_similarity_and_permutation_invariance(self, pts, angle, scale, shift):
        p = np.array(pts)
        e = [np.linalg.norm(p[i] - p[(i + 1) % 3]) for i in range(3)]
        if min(e) < 1e-3:
            return
        base = triangle_quality(*p)
        c, s = math.cos(angle), math.sin(angle)
        moved = scale * p @ np.array([[c, -s], [s, c]]).T + shift
        assert triangle_quality(*moved) == pytest.approx(base, rel=1e-9)
        assert triangle_quality(p[2], p[0], p[1]) == pytest.approx(base, rel=1e-12)
        assert triangle_quality(p[1], p[0], p[2]) == pytest.approx(base, rel=1e-12)
        assert 0.0 < base <= 1.0

    def test_vertex_quality(self, equilateral, hexagon_fan):
        assert vertex_quality(0, equilateral, build_adjacency(equilateral)) == pytest.approx(1.0)
        assert vertex_quality(0, hexagon_fan, build_adjacency(hexagon_fan)) == pytest.approx(1.0)

    def test_vertex_quality_mean(self):
        # vertex 0 touches an equilateral (1.0) and a 2:1:... triangle of quality 0.5
        h = math.sqrt(3) / 2
        m = Mesh([[0, 0], [1, 0], [0.5, h], [-2, 0], [-1, 0.0001]], [[0, 1, 2], [0, 4, 3]])
        adj = build_adjacency(m)
        q2 = triangle_quality(*m.xy[[0, 4, 3]])
        assert vertex_quality(0, m, adj) == pytest.approx((1.0 + q2) / 2)
        assert q2 == pytest.approx(0.5, abs=1e-4)

    def test_isolated_vertex(self):
        m = Mesh([[0, 0], [1, 0], [0, 1], [5, 5]], [[0, 1, 2]])
        adj = build_adjacency(m)
        with pytest.raises(QualityDomainError):
            vertex_quality(3, m, adj)
        with pytest.raises(QualityDomainError):
            global_quality(m, adj)
        with pytest.raises(MeshError):
            m.require_no_isolated()

    def test_global_single(self, equilateral):
        assert global_quality(equilateral, build_adjacency(equilateral)) == pytest.approx(1.0)

    def test_vectorised_matches_scalar(self):
        m = generate_synthetic(9, 7, 0.3, 3)
        adj = build_adjacency(m)
        vq = vertex_qualities(m, adj)
        for v in range(m.n_vertices):
            assert vq[v] == pytest.approx(vertex_quality(v, m, adj), rel=1e-14)
        g = global_quality(m, adj)
        assert vq.min() <= g <= vq.max()
        assert 0.0 <= vq.min() and vq.max() <= 1.0
