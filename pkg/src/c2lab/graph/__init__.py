"""
Labeled multigraphs, partitions and spanning structures.
"""

from c2lab.graph.core import (
    Block,
    Edge,
    LabeledGraph,
    Partition,
    VertexSubsetPartition,
    automorphism_check,
    canonical_partition,
    contract_edges,
    delete_edges,
    enumerate_spanning_forests,
    enumerate_spanning_trees,
    first_spanning_forest,
    forest_search,
    has_spanning_forest,
    incidence_matrix,
    require_connected,
)

__all__ = [
    "Block",
    "Edge",
    "LabeledGraph",
    "Partition",
    "VertexSubsetPartition",
    "automorphism_check",
    "canonical_partition",
    "contract_edges",
    "delete_edges",
    "enumerate_spanning_forests",
    "enumerate_spanning_trees",
    "first_spanning_forest",
    "forest_search",
    "has_spanning_forest",
    "incidence_matrix",
    "require_connected",
]
