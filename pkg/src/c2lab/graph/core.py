"""
Labeled multigraphs with stable edge indexing.

Edges are ordered ``(tail, head)`` pairs and an edge id is the position of the
edge in that list. Every mutating operation returns a new graph together with
re-indexing maps so polynomial variables can be followed across deletions and
contractions.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from c2lab.exceptions import (
    CycleCollapseError,
    GraphError,
    GraphFormatError,
    InvalidEdgeError,
    InvalidPartitionError,
    InvalidVertexError,
    NotConnectedError,
    SelfLoopError,
)

Edge = tuple[int, int]
Block = tuple[int, ...]
Partition = tuple[Block, ...]


@dataclass(frozen=True)
class LabeledGraph:
    """Multigraph on vertices ``0..vertex_count-1`` with ordered, indexed edges."""

    vertex_count: int
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise GraphError(detail=f"Negative vertex count {self.vertex_count}")
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        for eid, (tail, head) in enumerate(self.edges):
            for v in (tail, head):
                if not 0 <= v < self.vertex_count:
                    raise InvalidVertexError(v, self.vertex_count)
            if tail == head:
                raise SelfLoopError(eid, tail)

    # -------------------------------------------------------------------------
    # Construction and text format
    # -------------------------------------------------------------------------

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> LabeledGraph:
        return cls(vertex_count, tuple((e[0], e[1]) for e in edges))

    @classmethod
    def from_text(cls, text: str) -> LabeledGraph:
        """
        Parse the graph text format.

        The first non-comment line is ``v <vertex_count>``; every further line
        is ``e <tail> <head>`` in edge-id order. Lines starting with ``#`` are
        comments.
        """
        vertex_count: int | None = None
        edges: list[Edge] = []
        for number, raw in enumerate(text.split("\n"), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            try:
                if parts[0] == "v" and len(parts) == 2 and vertex_count is None:
                    vertex_count = int(parts[1])
                elif parts[0] == "e" and len(parts) == 3 and vertex_count is not None:
                    edges.append((int(parts[1]), int(parts[2])))
                else:
                    raise GraphFormatError(number, f"unexpected line {line!r}")
            except ValueError as e:
                raise GraphFormatError(number, str(e)) from e
        if vertex_count is None:
            raise GraphFormatError(0, "missing 'v <vertex_count>' header")
        return cls(vertex_count, tuple(edges))

    def to_text(self, comment: str | None = None) -> str:
        lines = [f"# {comment}"] if comment else []
        lines.append(f"v {self.vertex_count}")
        lines.extend(f"e {t} {h}" for t, h in self.edges)
        return "\n".join(lines) + "\n"

    def text_hash(self) -> str:
        """sha256 digest of the canonical (comment-free) text form."""
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()

    # -------------------------------------------------------------------------
    # Queries
    # -------------------------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def loop_number(self) -> int:
        """First Betti number |E| - |V| + #components."""
        return self.edge_count - self.vertex_count + len(self.components())

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex, ascending."""
        buckets: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for eid, (tail, head) in enumerate(self.edges):
            buckets[tail].append(eid)
            buckets[head].append(eid)
        return tuple(tuple(b) for b in buckets)

    def check_edge(self, eid: int) -> None:
        if not 0 <= eid < self.edge_count:
            raise InvalidEdgeError(eid, self.edge_count)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def degrees(self) -> list[int]:
        return [len(inc) for inc in self.incidence]

    def neighbors(self, v: int) -> list[int]:
        """Neighbours of ``v`` with multiplicity, in edge order."""
        out = []
        for eid in self.incidence[v]:
            tail, head = self.edges[eid]
            out.append(head if tail == v else tail)
        return out

    def other_end(self, eid: int, v: int) -> int:
        tail, head = self.edges[eid]
        return head if tail == v else tail

    def to_networkx(self) -> nx.MultiGraph:
        """``networkx.MultiGraph`` view with edge keys equal to edge ids."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        for eid, (tail, head) in enumerate(self.edges):
            graph.add_edge(tail, head, key=eid)
        return graph

    def components(self) -> list[frozenset[int]]:
        return [frozenset(c) for c in nx.connected_components(self.to_networkx())]

    def is_connected(self) -> bool:
        return self.vertex_count > 0 and nx.is_connected(self.to_networkx())

    def relabel(self, mapping: Sequence[int]) -> LabeledGraph:
        """Apply a vertex bijection; edge order and orientation are kept."""
        if sorted(mapping) != list(range(self.vertex_count)):
            raise GraphError(detail="Relabeling is not a permutation of the vertices")
        return LabeledGraph(
            self.vertex_count, tuple((mapping[t], mapping[h]) for t, h in self.edges)
        )

    def edge_multiset(self) -> Counter[tuple[int, int]]:
        return Counter((min(t, h), max(t, h)) for t, h in self.edges)


# -----------------------------------------------------------------------------
# Vertex partitions
# -----------------------------------------------------------------------------


def canonical_partition(blocks: Iterable[Iterable[int]]) -> Partition:
    """Blocks sorted internally and ordered by their minimum element."""
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class VertexSubsetPartition:
    """A set partition of a subset of the vertices, in canonical form."""

    blocks: Partition

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> VertexSubsetPartition:
        raw = [tuple(b) for b in blocks]
        seen: set[int] = set()
        for block in raw:
            if not block:
                raise InvalidPartitionError(detail="Empty block in partition")
            for v in block:
                if v in seen:
                    raise InvalidPartitionError(detail=f"Vertex {v} appears in two blocks")
                seen.add(v)
        return cls(canonical_partition(raw))

    def validate(self, g: LabeledGraph) -> None:
        for block in self.blocks:
            for v in block:
                if not 0 <= v < g.vertex_count:
                    raise InvalidPartitionError(
                        detail=f"Vertex {v} outside graph with {g.vertex_count} vertices"
                    )

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for block in self.blocks for v in block)

    def relabel(self, mapping: Mapping[int, int] | Sequence[int]) -> VertexSubsetPartition:
        return VertexSubsetPartition.of([mapping[v] for v in block] for block in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __str__(self) -> str:
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


# -----------------------------------------------------------------------------
# Operations
# -----------------------------------------------------------------------------


def incidence_matrix(g: LabeledGraph, dropped_vertex: int | None = None) -> np.ndarray:
    """
    Signed incidence matrix with one vertex row removed.

    Entry ``(v, e)`` is +1 when ``v`` is the head of ``e`` and -1 when it is the
    tail. Rows follow ascending vertex id with ``dropped_vertex`` (default: the
    highest-numbered vertex) omitted.
    """
    if g.vertex_count == 0:
        raise GraphError(detail="Incidence matrix of the empty graph")
    if dropped_vertex is None:
        dropped_vertex = g.vertex_count - 1
    if not 0 <= dropped_vertex < g.vertex_count:
        raise InvalidVertexError(dropped_vertex, g.vertex_count)
    full = np.zeros((g.vertex_count, g.edge_count), dtype=np.int64)
    for eid, (tail, head) in enumerate(g.edges):
        full[head, eid] = 1
        full[tail, eid] = -1
    return np.delete(full, dropped_vertex, axis=0)


def delete_edges(g: LabeledGraph, edge_ids: Iterable[int]) -> tuple[LabeledGraph, dict[int, int]]:
    """Remove edges; survivors keep their relative order. Returns ``old id -> new id``."""
    doomed = _checked_edge_set(g, edge_ids)
    mapping: dict[int, int] = {}
    kept: list[Edge] = []
    for eid, edge in enumerate(g.edges):
        if eid in doomed:
            continue
        mapping[eid] = len(kept)
        kept.append(edge)
    return LabeledGraph(g.vertex_count, tuple(kept)), mapping


def contract_edges(
    g: LabeledGraph, edge_ids: Iterable[int]
) -> tuple[LabeledGraph, dict[int, int], dict[int, int]]:
    """
    Identify the endpoints of the selected edges.

    Merged classes are renumbered densely in order of their smallest original
    vertex. Returns ``(graph, vertex map, edge map)`` where the edge map covers
    the surviving (unselected) edges. Raises ``CycleCollapseError`` if the
    selection contains a cycle, or if an unselected edge would become a loop.
    """
    selected = _checked_edge_set(g, edge_ids)
    forest = _UnionFind(g.vertex_count)
    for eid in sorted(selected):
        tail, head = g.edges[eid]
        if not forest.union(tail, head):
            raise CycleCollapseError(eid)

    smallest: dict[int, int] = {}
    for v in range(g.vertex_count):
        smallest.setdefault(forest.find(v), v)
    roots = sorted(smallest, key=smallest.__getitem__)
    new_id = {root: i for i, root in enumerate(roots)}
    vertex_map = {v: new_id[forest.find(v)] for v in range(g.vertex_count)}

    edge_map: dict[int, int] = {}
    kept: list[Edge] = []
    for eid, (tail, head) in enumerate(g.edges):
        if eid in selected:
            continue
        if vertex_map[tail] == vertex_map[head]:
            raise CycleCollapseError(eid)
        edge_map[eid] = len(kept)
        kept.append((vertex_map[tail], vertex_map[head]))
    return LabeledGraph(len(roots), tuple(kept)), vertex_map, edge_map


def enumerate_spanning_trees(g: LabeledGraph) -> Iterator[frozenset[int]]:
    """Spanning trees as edge-id sets, in lexicographic order of sorted ids."""
    if g.vertex_count == 0:
        return
    yield from enumerate_spanning_forests(g, VertexSubsetPartition.of([range(g.vertex_count)]))


def enumerate_spanning_forests(
    g: LabeledGraph, partition: VertexSubsetPartition
) -> Iterator[frozenset[int]]:
    """
    Spanning forests whose trees are in bijection with the partition's blocks.

    Each block lies inside its own tree and every vertex of ``g`` belongs to
    some tree. Forests are produced in lexicographic order of sorted edge ids.
    """
    partition.validate(g)
    yield from forest_search(g, partition.blocks, range(g.edge_count))


def has_spanning_forest(
    g: LabeledGraph, blocks: Partition, edge_ids: Iterable[int] | None = None
) -> bool:
    """Whether at least one forest realises ``blocks`` using only ``edge_ids``."""
    eids = range(g.edge_count) if edge_ids is None else edge_ids
    return next(forest_search(g, blocks, eids), None) is not None


def first_spanning_forest(
    g: LabeledGraph, blocks: Partition, edge_ids: Iterable[int] | None = None
) -> frozenset[int] | None:
    eids = range(g.edge_count) if edge_ids is None else edge_ids
    return next(forest_search(g, blocks, eids), None)


def automorphism_check(g: LabeledGraph, permutation: Sequence[int]) -> bool:
    """True iff the vertex permutation preserves the edge multiset."""
    if len(permutation) != g.vertex_count:
        raise GraphError(
            detail=f"Permutation of length {len(permutation)} for {g.vertex_count} vertices"
        )
    if sorted(permutation) != list(range(g.vertex_count)):
        raise GraphError(detail="Not a permutation")
    return g.relabel(permutation).edge_multiset() == g.edge_multiset()


def require_connected(g: LabeledGraph) -> None:
    if not g.is_connected():
        raise NotConnectedError(detail=f"Graph with {g.vertex_count} vertices is disconnected")


# -----------------------------------------------------------------------------
# Internals
# -----------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _checked_edge_set(g: LabeledGraph, edge_ids: Iterable[int]) -> frozenset[int]:
    ids = list(edge_ids)
    for eid in ids:
        g.check_edge(eid)
    if len(set(ids)) != len(ids):
        dup = next(e for e in ids if ids.count(e) > 1)
        raise InvalidEdgeError(dup, g.edge_count, reason="repeated")
    return frozenset(ids)


def forest_search(
    g: LabeledGraph, blocks: Partition, edge_ids: Iterable[int]
) -> Iterator[frozenset[int]]:
    """
    Yield edge sets from ``edge_ids`` forming spanning forests whose trees each
    hold exactly one block of ``blocks``.

    Forests come out in lexicographic order of their sorted edge ids.
    """
    # Components carry the index of the block they contain (or -1); joining two
    # components tagged with different blocks is forbidden.
    candidates = sorted(set(edge_ids))
    n = g.vertex_count
    if not blocks:
        if n == 0:
            yield frozenset()
        return
    target = n - len(blocks)
    if target < 0:
        return
    tag0 = [-1] * n
    for index, block in enumerate(blocks):
        for v in block:
            tag0[v] = index
    parent0 = list(range(n))

    def find(parent: list[int], v: int) -> int:
        while parent[v] != v:
            v = parent[v]
        return v

    def feasible(parent: list[int], tag: list[int], start: int) -> bool:
        # Using every remaining candidate edge, each block must be able to
        # close up and every vertex must reach some block.
        par = parent[:]
        tg = tag[:]

        def root(v: int) -> int:
            while par[v] != v:
                par[v] = par[par[v]]
                v = par[v]
            return v

        for eid in candidates[start:]:
            a, b = root(g.edges[eid][0]), root(g.edges[eid][1])
            if a != b:
                par[b] = a
                if tg[a] == -1:
                    tg[a] = tg[b]
        block_root: dict[int, int] = {}
        for index, block in enumerate(blocks):
            roots = {root(v) for v in block}
            if len(roots) != 1:
                return False
            block_root[index] = roots.pop()
        covered = set(block_root.values())
        return all(root(v) in covered for v in range(n))

    def search(
        start: int, chosen: list[int], parent: list[int], tag: list[int]
    ) -> Iterator[frozenset[int]]:
        if len(chosen) == target:
            if all(len({find(parent, v) for v in block}) == 1 for block in blocks):
                roots_with_block = {find(parent, block[0]) for block in blocks}
                if all(find(parent, v) in roots_with_block for v in range(n)):
                    yield frozenset(chosen)
            return
        if len(candidates) - start < target - len(chosen):
            return
        if not feasible(parent, tag, start):
            return
        eid = candidates[start]
        a, b = find(parent, g.edges[eid][0]), find(parent, g.edges[eid][1])
        if a != b and not (tag[a] != -1 and tag[b] != -1 and tag[a] != tag[b]):
            parent2 = parent[:]
            tag2 = tag[:]
            parent2[b] = a
            if tag2[a] == -1:
                tag2[a] = tag2[b]
            chosen.append(eid)
            yield from search(start + 1, chosen, parent2, tag2)
            chosen.pop()
        yield from search(start + 1, chosen, parent, tag)

    yield from search(0, [], parent0, tag0)
