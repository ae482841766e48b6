"""
Graph family generators.

Toroidal grids, circulant graphs, X-ladders and decompletion, plus the two
explicit vertex labelings that identify toroidal grids with circulants.
All labels are 0-based.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cache
from importlib import resources
from typing import Literal

import networkx as nx
import structlog

from c2lab.exceptions import (
    FamilyParameterError,
    LabelingError,
    NotFourRegularError,
)
from c2lab.graph.core import Edge, LabeledGraph

logger = structlog.get_logger(__name__)

FamilyKind = Literal["toroidal", "circulant", "capped_x_ladder", "symmetric_x_ladder"]

# Middle-rung vertex of a capped X-ladder. Removing it gives the one decompletion
# not isomorphic to removing vertex 0; symmetric ladders are vertex-transitive.
X_LADDER_EXCEPTIONAL_VERTEX = 2


# -----------------------------------------------------------------------------
# Toroidal grids and circulants
# -----------------------------------------------------------------------------


def gen_toroidal_grid(k: int, l: int, m: int) -> LabeledGraph:  # noqa: E741
    """
    Lattice quotient by the translations ``(k, 0)`` and ``(l, m)``.

    Vertex ``(a, b)`` has id ``a + b*k``. Horizontal edges come first, then
    vertical ones; the vertical edge leaving the top row lands on
    ``((a - l) mod k, 0)`` since ``(a, m)`` and ``(a - l, 0)`` are identified.
    """
    if k < 3 or m < 3 or l < 0:
        raise FamilyParameterError(detail=f"Toroidal grid needs k, m >= 3 and l >= 0, got ({k}, {l}, {m})")

    def vid(a: int, b: int) -> int:
        return a + b * k

    edges: list[Edge] = []
    for b in range(m):
        for a in range(k):
            edges.append((vid(a, b), vid((a + 1) % k, b)))
    for b in range(m):
        for a in range(k):
            if b == m - 1:
                edges.append((vid(a, b), vid((a - l) % k, 0)))
            else:
                edges.append((vid(a, b), vid(a, b + 1)))
    return LabeledGraph(k * m, tuple(edges))


def gen_circulant(n: int, gaps: list[int] | tuple[int, ...]) -> LabeledGraph:
    """``C_n(gaps)``: edges ``{i, i + g mod n}``, ordered by gap then by i, without repeats."""
    if n < 3:
        raise FamilyParameterError(detail=f"Circulant needs n >= 3, got {n}")
    if not gaps:
        raise FamilyParameterError(detail="Circulant needs at least one gap")
    for g in gaps:
        if not 0 < g < n:
            raise FamilyParameterError(detail=f"Gap {g} outside 1..{n - 1}")
    if len({min(g, n - g) for g in gaps}) != len(gaps):
        raise FamilyParameterError(detail=f"Gaps {list(gaps)} are not distinct mod {n}")
    seen: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    for g in gaps:
        for i in range(n):
            j = (i + g) % n
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                edges.append((i, j))
    return LabeledGraph(n, tuple(edges))


def gen_cartesian_cycles(k: int, m: int) -> LabeledGraph:
    """Reference ``C_k x C_m`` built with networkx; vertex ``(a, b)`` has id ``a + b*k``."""
    if k < 3 or m < 3:
        raise FamilyParameterError(detail=f"Cycles need length >= 3, got ({k}, {m})")
    product = nx.cartesian_product(nx.cycle_graph(k), nx.cycle_graph(m))
    edges = sorted(
        (min(a1 + b1 * k, a2 + b2 * k), max(a1 + b1 * k, a2 + b2 * k))
        for (a1, b1), (a2, b2) in product.edges()
    )
    return LabeledGraph(k * m, tuple(edges))


def _verify_isomorphism(source: LabeledGraph, target: LabeledGraph, mapping: list[int]) -> None:
    if sorted(mapping) != list(range(source.vertex_count)):
        raise LabelingError(detail="Labels collide; the map is not a bijection")
    if source.relabel(mapping).edge_multiset() != target.edge_multiset():
        raise LabelingError(detail="The labeling does not carry edges to edges")


def iso_skew_labeling(k: int, l: int, m: int) -> list[int]:  # noqa: E741
    """
    Isomorphism from the skew grid ``(k, l, m)`` onto ``C_{km}(l, m)``.

    ``(a, b)`` goes to ``a*m + (m - b - 1)*l mod km``; needs ``gcd(m, l) = 1``.
    """
    if l <= 0:
        raise LabelingError(detail=f"Skew labeling needs l > 0, got {l}")
    if math.gcd(m, l) != 1:
        raise LabelingError(detail=f"gcd(m, l) = gcd({m}, {l}) = {math.gcd(m, l)} != 1")
    n = k * m
    mapping = [0] * n
    for b in range(m):
        for a in range(k):
            mapping[a + b * k] = (a * m + (m - b - 1) * l) % n
    _verify_isomorphism(gen_toroidal_grid(k, l, m), gen_circulant(n, [l, m]), mapping)
    return mapping


def iso_nonskew_labeling(k: int, m: int) -> list[int]:
    """Isomorphism from the grid ``(k, 0, m)`` onto ``C_{km}(k, m)``; needs ``gcd(k, m) = 1``."""
    if math.gcd(k, m) != 1:
        raise LabelingError(detail=f"gcd(k, m) = gcd({k}, {m}) = {math.gcd(k, m)} != 1")
    n = k * m
    mapping = [0] * n
    for b in range(m):
        for a in range(k):
            mapping[a + b * k] = (a * m + b * k) % n
    _verify_isomorphism(gen_toroidal_grid(k, 0, m), gen_circulant(n, [k, m]), mapping)
    return mapping


# -----------------------------------------------------------------------------
# X-ladders
# -----------------------------------------------------------------------------


def gen_x_ladder(size: int, capped: bool) -> LabeledGraph:
    """
    Completed X-ladder on ``size`` vertices (even, at least 8).

    Rung ``i`` is ``u_i = 2i``, ``v_i = 2i + 1`` and consecutive rungs are
    joined by a crossed square. A capped ladder closes its end rungs with rung
    edges and joins the ends straight; a symmetric ladder joins the last rung
    to the first with one more crossed square.
    """
    if size < 8 or size % 2:
        raise FamilyParameterError(
            detail=f"X-ladders have an even number of vertices >= 8, got {size}"
        )
    rungs = size // 2
    edges: list[Edge] = []
    for i in range(rungs - 1):
        u, v, u2, v2 = 2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3
        edges += [(u, u2), (v, v2), (u, v2), (v, u2)]
    last_u, last_v = size - 2, size - 1
    if capped:
        edges += [(0, 1), (last_u, last_v), (0, last_u), (1, last_v)]
    else:
        edges += [(last_u, 0), (last_v, 1), (last_u, 1), (last_v, 0)]
    return LabeledGraph(size, tuple(edges))


def find_twins(g: LabeledGraph) -> list[tuple[int, int]]:
    """Pairs of non-adjacent vertices with identical neighbourhoods (with multiplicity)."""
    signature = [Counter(g.neighbors(v)) for v in range(g.vertex_count)]
    pairs = []
    for u in range(g.vertex_count):
        for v in range(u + 1, g.vertex_count):
            if signature[u] == signature[v] and v not in signature[u]:
                pairs.append((u, v))
    return pairs


def x_ladder_twin_swap(g: LabeledGraph) -> list[int]:
    """Vertex permutation exchanging the first twin pair; an automorphism of ``g``."""
    pairs = find_twins(g)
    if not pairs:
        raise FamilyParameterError(detail="Graph has no twin vertices")
    u, v = pairs[0]
    perm = list(range(g.vertex_count))
    perm[u], perm[v] = v, u
    return perm


@cache
def load_x_ladder_golden() -> dict[tuple[str, int], LabeledGraph]:
    """The shipped adjacency lists keyed by ``(kind, completed size)``."""
    text = resources.files("c2lab.data").joinpath("x_ladders.txt").read_text(encoding="ascii")
    graphs: dict[tuple[str, int], LabeledGraph] = {}
    for chunk in text.split("## ")[1:]:
        header, _, body = chunk.partition("\n")
        kind, size = header.split()
        graphs[(kind, int(size))] = LabeledGraph.from_text(body)
    return graphs


# -----------------------------------------------------------------------------
# Decompletion
# -----------------------------------------------------------------------------


def decomplete(g: LabeledGraph, v: int = 0) -> LabeledGraph:
    """Delete ``v`` and its edges from a connected 4-regular graph; later vertices shift down."""
    bad = {u: d for u, d in enumerate(g.degrees()) if d != 4}
    if bad:
        raise NotFourRegularError(bad)
    if not g.is_connected():
        raise FamilyParameterError(detail="Decompletion needs a connected graph")
    if not 0 <= v < g.vertex_count:
        raise FamilyParameterError(detail=f"Vertex {v} not in graph with {g.vertex_count} vertices")

    def shift(u: int) -> int:
        return u - 1 if u > v else u

    edges = tuple((shift(t), shift(h)) for t, h in g.edges if v not in (t, h))
    result = LabeledGraph(g.vertex_count - 1, edges)
    assert 2 + result.edge_count == 2 * result.vertex_count
    return result


# -----------------------------------------------------------------------------
# Family identifiers
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyId:
    """A named member of one of the generated families."""

    kind: FamilyKind
    params: tuple[int, ...]
    decompleted: bool = True
    decompletion_vertex: int = 0

    @classmethod
    def x_ladder(cls, size: int, capped: bool, exceptional: bool = False) -> FamilyId:
        """Decompleted X-ladder, at vertex 0 or at the exceptional middle-rung vertex."""
        if exceptional and not capped:
            raise FamilyParameterError(detail="Symmetric X-ladders have a single decompletion")
        kind: FamilyKind = "capped_x_ladder" if capped else "symmetric_x_ladder"
        vertex = X_LADDER_EXCEPTIONAL_VERTEX if exceptional else 0
        return cls(kind, (size,), decompletion_vertex=vertex)

    @property
    def is_exceptional(self) -> bool:
        return (
            self.kind == "capped_x_ladder"
            and self.decompleted
            and self.decompletion_vertex == X_LADDER_EXCEPTIONAL_VERTEX
        )

    def completed(self) -> LabeledGraph:
        if self.kind == "toroidal":
            if len(self.params) != 3:
                raise FamilyParameterError(detail="toroidal needs k l m")
            return gen_toroidal_grid(*self.params)
        if self.kind == "circulant":
            if len(self.params) < 2:
                raise FamilyParameterError(detail="circulant needs n and at least one gap")
            return gen_circulant(self.params[0], list(self.params[1:]))
        if len(self.params) != 1:
            raise FamilyParameterError(detail="X-ladders take a single size")
        return gen_x_ladder(self.params[0], capped=self.kind == "capped_x_ladder")

    def build(self) -> LabeledGraph:
        g = self.completed()
        return decomplete(g, self.decompletion_vertex) if self.decompleted else g

    @property
    def label(self) -> str:
        args = ",".join(map(str, self.params))
        suffix = f"~{self.decompletion_vertex}" if self.decompleted else ""
        return f"{self.kind}({args}){suffix}"

    @property
    def census_name(self) -> str | None:
        return census_name(self)


def census_name(family: FamilyId) -> str | None:
    """Known census names for the small members (P_{loops,index})."""
    if not family.decompleted:
        return None
    if family.kind == "capped_x_ladder" and family.params == (8,):
        return "P_{6,3}"
    if family.kind == "toroidal" and family.params == (3, 0, 3):
        return "P_{7,10}"
    return None
