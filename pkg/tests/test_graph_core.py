"""
Tests for labeled multigraphs, partitions and spanning forests.
"""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from c2lab.exceptions import (
    CycleCollapseError,
    GraphFormatError,
    InvalidEdgeError,
    InvalidPartitionError,
    SelfLoopError,
)
from c2lab.graph.core import (
    LabeledGraph,
    VertexSubsetPartition,
    automorphism_check,
    contract_edges,
    delete_edges,
    enumerate_spanning_forests,
    enumerate_spanning_trees,
    forest_search,
    has_spanning_forest,
    incidence_matrix,
)
from tests.strategies import connected_graphs


class TestTextFormat:
    """Test the graph text format."""

    def test_round_trip(self, k4):
        """Test that to_text and from_text are inverse."""
        assert LabeledGraph.from_text(k4.to_text("K4")) == k4

    def test_comments_and_blank_lines(self):
        """Test that comments and blank lines are skipped."""
        g = LabeledGraph.from_text("# a comment\n\nv 3\ne 0 1\n# between\ne 1 2\n")

        assert g.vertex_count == 3
        assert g.edges == ((0, 1), (1, 2))

    def test_missing_header(self):
        """Test that edges before the header are rejected."""
        with pytest.raises(GraphFormatError):
            LabeledGraph.from_text("e 0 1\n")

    def test_garbage_line(self):
        """Test that malformed lines report their line number."""
        with pytest.raises(GraphFormatError) as exc:
            LabeledGraph.from_text("v 2\ne 0 x\n")
        assert exc.value.line_number == 2

    def test_hash_ignores_comment(self, triangle):
        """Test that the graph hash is taken over the comment-free text."""
        assert triangle.text_hash() == LabeledGraph.from_text(triangle.to_text("note")).text_hash()
        assert len(triangle.text_hash()) == 64


class TestLabeledGraph:
    """Test graph construction and queries."""

    def test_self_loop_rejected(self):
        """Test that self-loops are rejected."""
        with pytest.raises(SelfLoopError):
            LabeledGraph(2, ((0, 1), (1, 1)))

    def test_parallel_edges_kept(self):
        """Test that parallel edges keep separate ids."""
        g = LabeledGraph(2, ((0, 1), (1, 0)))

        assert g.edge_count == 2
        assert g.neighbors(0) == [1, 1]
        assert g.to_networkx().number_of_edges() == 2

    def test_degrees_and_loops(self, k4):
        """Test degrees and loop number."""
        assert k4.degrees() == [3, 3, 3, 3]
        assert k4.loop_number == 3

    def test_components(self):
        """Test components of a disconnected graph."""
        g = LabeledGraph(4, ((0, 1), (2, 3)))

        assert not g.is_connected()
        assert sorted(map(sorted, g.components())) == [[0, 1], [2, 3]]

    def test_relabel(self, triangle):
        """Test relabeling keeps edge order."""
        g = triangle.relabel([2, 0, 1])

        assert g.edges == ((2, 0), (0, 1), (1, 2))


class TestPartitions:
    """Test vertex subset partitions."""

    def test_canonical_form(self):
        """Test blocks are sorted internally and by minimum."""
        assert VertexSubsetPartition.of([[3, 1], [0]]).blocks == ((0,), (1, 3))

    def test_overlap_rejected(self):
        """Test overlapping blocks are rejected."""
        with pytest.raises(InvalidPartitionError):
            VertexSubsetPartition.of([[0, 1], [1]])

    def test_relabel(self):
        """Test relabeling a partition."""
        part = VertexSubsetPartition.of([[0, 1], [2]]).relabel({0: 5, 1: 3, 2: 4})

        assert str(part) == "{3,5}{4}"


class TestOperations:
    """Test incidence, deletion and contraction."""

    def test_incidence_matrix(self, triangle):
        """Test signs and the dropped row."""
        m = incidence_matrix(triangle)

        assert m.shape == (2, 3)
        assert m[0].tolist() == [-1, 0, 1]
        assert m[1].tolist() == [1, -1, 0]
        assert np.array_equal(incidence_matrix(triangle, dropped_vertex=0)[0], m[1])

    def test_delete_edges(self, k4):
        """Test deletion keeps relative edge order."""
        g, mapping = delete_edges(k4, [1, 4])

        assert g.edges == ((0, 1), (0, 3), (1, 2), (2, 3))
        assert mapping == {0: 0, 2: 1, 3: 2, 5: 3}

    def test_delete_repeated_edge(self, k4):
        """Test repeated edge ids are rejected."""
        with pytest.raises(InvalidEdgeError):
            delete_edges(k4, [1, 1])

    def test_contract_edge(self, triangle):
        """Test contracting one triangle edge leaves a double edge."""
        g, vertex_map, edge_map = contract_edges(triangle, [0])

        assert g.vertex_count == 2
        assert g.edge_multiset()[(0, 1)] == 2
        assert vertex_map == {0: 0, 1: 0, 2: 1}
        assert edge_map == {1: 0, 2: 1}

    def test_contract_collapse(self, triangle):
        """Test contracting two triangle edges turns the third into a loop."""
        with pytest.raises(CycleCollapseError):
            contract_edges(triangle, [0, 1])


    @given(connected_graphs(max_vertices=5, max_edges=8), st.data())
    @settings(max_examples=60, deadline=None)
    def test_delete_and_contract_commute(self, g, data):
        """Test deleting then contracting equals contracting then deleting."""
        ids = list(range(g.edge_count))
        doomed = data.draw(st.lists(st.sampled_from(ids), unique=True, max_size=3))
        free = [e for e in ids if e not in doomed]
        merged = data.draw(st.lists(st.sampled_from(free), unique=True, max_size=3)) if free else []
        try:
            contract_edges(g, merged)
        except CycleCollapseError:
            assume(False)

        deleted, delete_map = delete_edges(g, doomed)
        first, first_vertices, first_edges = contract_edges(deleted, [delete_map[e] for e in merged])
        contracted, second_vertices, contract_map = contract_edges(g, merged)
        second, second_edges = delete_edges(contracted, [contract_map[e] for e in doomed])

        assert first == second
        assert first_vertices == second_vertices
        survivors = [e for e in free if e not in merged]
        assert [first_edges[delete_map[e]] for e in survivors] == [
            second_edges[contract_map[e]] for e in survivors
        ]


class TestSpanningForests:
    """Test spanning tree and forest enumeration."""

    def test_cayley_k4(self, k4):
        """Test K4 has 16 spanning trees."""
        trees = list(enumerate_spanning_trees(k4))

        assert len(trees) == 16
        assert trees == sorted(trees, key=sorted)

    def test_two_block_forests(self, path3):
        """Test forests separating the path's ends."""
        forests = list(enumerate_spanning_forests(path3, VertexSubsetPartition.of([[0], [2]])))

        assert forests == [frozenset({0}), frozenset({1})]

    def test_forest_search_order(self, k4):
        """Test one-block forests come out as the sorted spanning trees."""
        forests = list(forest_search(k4, ((0,),), range(k4.edge_count)))

        assert forests == sorted(enumerate_spanning_trees(k4), key=sorted)
        assert forests == sorted(forests, key=sorted)

    def test_forest_search_restricted_edges(self, k4):
        """Test only the given edge ids are used."""
        forests = list(forest_search(k4, ((0,), (3,)), [0, 3, 5]))

        assert forests == [frozenset({0, 3}), frozenset({0, 5}), frozenset({3, 5})]

    def test_unreachable_vertex(self):
        """Test a vertex outside every block's component kills the forest."""
        g = LabeledGraph(3, ((0, 1),))

        assert not has_spanning_forest(g, ((0,),))
        assert has_spanning_forest(g, ((0,), (2,)))

    @given(connected_graphs(max_vertices=5, max_edges=7))
    @settings(max_examples=40, deadline=None)
    def test_tree_count_matches_matrix_tree(self, g):
        """Test the number of spanning trees against the reduced Laplacian."""
        a = incidence_matrix(g).astype(float)
        expected = round(np.linalg.det(a @ a.T))

        assert len(list(enumerate_spanning_trees(g))) == expected


class TestAutomorphisms:
    """Test automorphism checks."""

    def test_rotation_of_triangle(self, triangle):
        """Test a rotation is an automorphism."""
        assert automorphism_check(triangle, [1, 2, 0])

    def test_non_automorphism(self, path3):
        """Test moving an end to the middle is not."""
        assert not automorphism_check(path3, [1, 0, 2])
