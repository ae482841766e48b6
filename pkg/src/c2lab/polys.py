"""
Graph polynomials over F_p.

Kirchhoff and Dodgson polynomials are never expanded: they are evaluated as
determinants of the matrix ``M = [[diag(alpha), E^T], [-E, 0]]`` where ``E`` is
the signed incidence matrix with one vertex row removed. Spanning forest
polynomials are carried symbolically as partitions of marked vertices, and
``ForestPolyExpr`` holds linear combinations of products of them on a shared
host graph. Edge assignment (cut or contract one edge in every factor) keeps
such combinations closed, which is what the coefficient counter and the
recurrence engine are built on.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import structlog

from c2lab.exceptions import (
    C2LabError,
    InvalidEdgeError,
    InvalidPartitionError,
    PreconditionError,
    UnsupportedCharacteristicError,
)
from c2lab.fp.linalg import FpElement, batched_det_mod_p, check_prime
from c2lab.graph.core import (
    LabeledGraph,
    Partition,
    VertexSubsetPartition,
    canonical_partition,
    first_spanning_forest,
    forest_search,
    incidence_matrix,
)

logger = structlog.get_logger(__name__)

StateKey = tuple[Partition, ...]
Evaluator = Callable[[np.ndarray], np.ndarray]
Point = Mapping[int, int] | Sequence[int]


# -----------------------------------------------------------------------------
# Dodgson specifications
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class DodgsonSpec:
    """Index sets selecting the Dodgson polynomial with rows ``i``, columns ``j`` removed and ``k`` zeroed."""

    i: frozenset[int] = frozenset()
    j: frozenset[int] = frozenset()
    k: frozenset[int] = frozenset()

    @classmethod
    def of(
        cls, i: Iterable[int] = (), j: Iterable[int] = (), k: Iterable[int] = ()
    ) -> DodgsonSpec:
        return cls(frozenset(i), frozenset(j), frozenset(k))

    @property
    def removed(self) -> frozenset[int]:
        return self.i | self.j | self.k

    def validate(self, g: LabeledGraph) -> None:
        if len(self.i) != len(self.j):
            raise PreconditionError(detail=f"|I| = {len(self.i)} but |J| = {len(self.j)}")
        for eid in self.removed:
            g.check_edge(eid)
        clash = self.k & (self.i | self.j)
        if clash:
            raise InvalidEdgeError(min(clash), g.edge_count, reason="in K and in I or J")

    def variables(self, g: LabeledGraph) -> tuple[int, ...]:
        return tuple(e for e in range(g.edge_count) if e not in self.removed)

    def __str__(self) -> str:
        def fmt(s: frozenset[int]) -> str:
            return ",".join(map(str, sorted(s)))

        return f"Psi[{fmt(self.i)};{fmt(self.j)}]_{{{fmt(self.k)}}}"


# -----------------------------------------------------------------------------
# Determinant evaluation
# -----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DodgsonMatrix:
    """``M(I, J)`` with the edge variables left as holes on the diagonal."""

    base: np.ndarray
    diag_rows: np.ndarray
    diag_cols: np.ndarray
    variables: tuple[int, ...]
    p: int

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at a ``(B, len(variables))`` array of residues."""
        batch = points.shape[0]
        size = self.base.shape[0]
        stack = np.broadcast_to(self.base, (batch, size, size)).copy()
        if self.variables:
            stack[:, self.diag_rows, self.diag_cols] = points % self.p
        return batched_det_mod_p(stack, self.p)


def dodgson_matrix(
    g: LabeledGraph, spec: DodgsonSpec, p: int, dropped_vertex: int | None = None
) -> DodgsonMatrix:
    """Build ``M(I, J)`` with ``alpha_e = 0`` for ``e`` in K; rows and columns removed in ascending order."""
    check_prime(p)
    spec.validate(g)
    inc = incidence_matrix(g, dropped_vertex)
    n_edges = g.edge_count
    size = n_edges + inc.shape[0]
    full = np.zeros((size, size), dtype=np.int64)
    full[:n_edges, n_edges:] = inc.T
    full[n_edges:, :n_edges] = -inc
    keep_rows = [r for r in range(size) if not (r < n_edges and r in spec.i)]
    keep_cols = [c for c in range(size) if not (c < n_edges and c in spec.j)]
    base = full[np.ix_(keep_rows, keep_cols)] % p
    row_pos = {r: idx for idx, r in enumerate(keep_rows)}
    col_pos = {c: idx for idx, c in enumerate(keep_cols)}
    variables = spec.variables(g)
    return DodgsonMatrix(
        base=base,
        diag_rows=np.array([row_pos[e] for e in variables], dtype=np.intp),
        diag_cols=np.array([col_pos[e] for e in variables], dtype=np.intp),
        variables=variables,
        p=p,
    )


def _point_vector(point: Point, variables: Sequence[int]) -> np.ndarray:
    try:
        return np.array([[int(point[e]) for e in variables]], dtype=np.int64)
    except (KeyError, IndexError) as e:
        raise PreconditionError(detail=f"Point has no value for edge {e}") from e


def eval_kirchhoff(
    g: LabeledGraph, point: Point, p: int, dropped_vertex: int | None = None
) -> FpElement:
    """Kirchhoff polynomial (sum over spanning trees of the complement monomials) at a point."""
    return eval_dodgson(g, DodgsonSpec(), point, p, dropped_vertex)


def eval_dodgson(
    g: LabeledGraph,
    spec: DodgsonSpec,
    point: Point,
    p: int,
    dropped_vertex: int | None = None,
) -> FpElement:
    matrix = dodgson_matrix(g, spec, p, dropped_vertex)
    value = matrix.evaluate(_point_vector(point, matrix.variables))
    return FpElement(int(value[0]), p)


def dodgson_evaluator(
    g: LabeledGraph, spec: DodgsonSpec, p: int, dropped_vertex: int | None = None
) -> tuple[Evaluator, tuple[int, ...]]:
    """Vectorised evaluator over the spec's variables, plus that variable order."""
    matrix = dodgson_matrix(g, spec, p, dropped_vertex)
    return matrix.evaluate, matrix.variables


def product_evaluator(
    g: LabeledGraph,
    products: Sequence[tuple[int, Sequence[DodgsonSpec]]],
    p: int,
) -> tuple[Evaluator, tuple[int, ...]]:
    """
    Evaluator for ``sum(sign * prod(factors))`` where all factors share one variable set.
    """
    matrices = [[dodgson_matrix(g, s, p) for s in specs] for _, specs in products]
    variables = matrices[0][0].variables
    for row in matrices:
        for m in row:
            if m.variables != variables:
                raise PreconditionError(detail="Factors do not share a variable set")
    signs = [sign % p for sign, _ in products]

    def evaluate(points: np.ndarray) -> np.ndarray:
        total = np.zeros(points.shape[0], dtype=np.int64)
        for sign, row in zip(signs, matrices, strict=True):
            term = np.full(points.shape[0], sign, dtype=np.int64)
            for m in row:
                term = term * m.evaluate(points) % p
            total = (total + term) % p
        return total

    return evaluate, variables


# -----------------------------------------------------------------------------
# Spanning forest polynomials
# -----------------------------------------------------------------------------


def eval_forest_poly(
    g: LabeledGraph,
    partition: VertexSubsetPartition,
    point: Point,
    p: int,
    edge_ids: Iterable[int] | None = None,
) -> FpElement:
    """Sum over P-forests of the product of the variables of edges outside the forest."""
    check_prime(p)
    partition.validate(g)
    eids = sorted(range(g.edge_count) if edge_ids is None else edge_ids)
    total = 0
    for forest in forest_search(g, partition.blocks, eids):
        term = 1
        for e in eids:
            if e not in forest:
                term = term * int(point[e]) % p
        total += term
    return FpElement(total, p)


# -----------------------------------------------------------------------------
# Dodgson -> spanning forest decomposition
# -----------------------------------------------------------------------------


def _set_partitions(items: Sequence[int], blocks: int) -> Iterator[list[list[int]]]:
    """Set partitions of ``items`` into exactly ``blocks`` nonempty blocks."""
    n = len(items)
    if blocks > n or (n > 0 and blocks == 0):
        return
    if n == 0:
        yield []
        return

    def grow(idx: int, current: list[list[int]]) -> Iterator[list[list[int]]]:
        remaining = n - idx
        if len(current) + remaining < blocks:
            return
        if idx == n:
            if len(current) == blocks:
                yield [list(b) for b in current]
            return
        item = items[idx]
        for block in current:
            block.append(item)
            yield from grow(idx + 1, current)
            block.pop()
        if len(current) < blocks:
            current.append([item])
            yield from grow(idx + 1, current)
            current.pop()

    yield from grow(0, [])


def _is_tree_on_parts(edges: Iterable[tuple[int, int]], part_of: Mapping[int, int], parts: int) -> bool:
    parent = list(range(parts))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = 0
    for u, v in edges:
        a, b = find(part_of[u]), find(part_of[v])
        if a == b:
            return False
        parent[a] = b
        count += 1
    return count == parts - 1


def admissible_partitions(g: LabeledGraph, spec: DodgsonSpec) -> list[Partition]:
    """
    Partitions of the endpoints of ``(I | J | K) - (I & J)`` for which both
    ``(J - I) | K`` and ``(I - J) | K`` form spanning trees on the parts.
    """
    spec.validate(g)
    active = (spec.i | spec.j | spec.k) - (spec.i & spec.j)
    marked = sorted({v for e in active for v in g.edges[e]})
    tree_a = [g.edges[e] for e in sorted((spec.j - spec.i) | spec.k)]
    tree_b = [g.edges[e] for e in sorted((spec.i - spec.j) | spec.k)]
    parts = len(tree_a) + 1
    if not marked:
        # only I & J is removed: the spanning tree polynomial of what is left
        return [((0,),)] if g.vertex_count else []
    found = []
    for blocks in _set_partitions(marked, parts):
        part_of = {v: idx for idx, block in enumerate(blocks) for v in block}
        if _is_tree_on_parts(tree_a, part_of, parts) and _is_tree_on_parts(tree_b, part_of, parts):
            found.append(canonical_partition(blocks))
    return sorted(found)


def _forest_poly_nonzero(g: LabeledGraph, blocks: Partition, remaining: frozenset[int]) -> bool:
    # cheap necessary conditions first, then an existence search
    degree = [0] * g.vertex_count
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in remaining:
        u, v = g.edges[e]
        degree[u] += 1
        degree[v] += 1
        parent[find(u)] = find(v)
    block_of = {v: idx for idx, block in enumerate(blocks) for v in block}
    for v in range(g.vertex_count):
        if degree[v] == 0:
            if v not in block_of or len(blocks[block_of[v]]) != 1:
                return False
    for block in blocks:
        if len({find(v) for v in block}) != 1:
            return False
    with_block = {find(block[0]) for block in blocks}
    if any(find(v) not in with_block for v in range(g.vertex_count)):
        return False
    return first_spanning_forest(g, blocks, remaining) is not None


@lru_cache(maxsize=4096)
def _nonzero_partitions(g: LabeledGraph, spec: DodgsonSpec) -> tuple[Partition, ...]:
    remaining = frozenset(spec.variables(g))
    return tuple(
        blocks
        for blocks in admissible_partitions(g, spec)
        if _forest_poly_nonzero(g, blocks, remaining)
    )


def is_identically_zero(g: LabeledGraph, spec: DodgsonSpec) -> bool:
    """Exact test: no admissible partition has a realising forest."""
    return not _nonzero_partitions(g, spec)


def dodgson_to_forest_mod2(g: LabeledGraph, spec: DodgsonSpec, p: int = 2) -> ForestPolyExpr:
    """
    Dodgson polynomial as a sum of spanning forest polynomials on ``g - (I | J | K)``.

    Valid modulo 2, where every coefficient is 1.
    """
    if p != 2:
        raise UnsupportedCharacteristicError(p)
    remaining = frozenset(spec.variables(g))
    terms = {(blocks,): 1 for blocks in _nonzero_partitions(g, spec)}
    return ForestPolyExpr.create(g, terms, remaining=remaining, modulus=2)


def dodgson_signed_decomposition(g: LabeledGraph, spec: DodgsonSpec, p: int) -> ForestPolyExpr:
    """
    Signed forest decomposition for any p (experimental for p > 2).

    Distinct partitions have disjoint monomials, so the sign of each term is
    the determinant value at the point that is 0 on one realising forest and 1
    elsewhere.
    """
    if p == 2:
        return dodgson_to_forest_mod2(g, spec)
    remaining = frozenset(spec.variables(g))
    matrix = dodgson_matrix(g, spec, p)
    terms: dict[StateKey, int] = {}
    for blocks in _nonzero_partitions(g, spec):
        forest = first_spanning_forest(g, blocks, remaining)
        assert forest is not None
        point = np.array([[0 if e in forest else 1 for e in matrix.variables]], dtype=np.int64)
        sign = int(matrix.evaluate(point)[0])
        if sign not in (1, p - 1):
            raise C2LabError(detail=f"Forest coefficient {sign} is not +-1 mod {p}")
        terms[(blocks,)] = 1 if sign == 1 else -1
    return ForestPolyExpr.create(g, terms, remaining=remaining, modulus=p)


def decompose(g: LabeledGraph, spec: DodgsonSpec, p: int) -> ForestPolyExpr:
    return dodgson_to_forest_mod2(g, spec) if p == 2 else dodgson_signed_decomposition(g, spec, p)


# -----------------------------------------------------------------------------
# c2 formula factors
# -----------------------------------------------------------------------------

FORMULA_EDGE_COUNT = {1: 3, 2: 4, 3: 5}
# c2 = FORMULA_SIGN * [F]_p
FORMULA_SIGN = {1: -1, 2: 1, 3: -1}


def formula_products(which: int, edges: Sequence[int]) -> list[tuple[int, list[DodgsonSpec]]]:
    """Signed products whose sum is the polynomial F of the chosen c2 formula."""
    if which not in FORMULA_EDGE_COUNT:
        raise PreconditionError(detail=f"Unknown formula {which}; choose 1, 2 or 3")
    if len(edges) != FORMULA_EDGE_COUNT[which] or len(set(edges)) != len(edges):
        raise PreconditionError(
            detail=f"Formula {which} needs {FORMULA_EDGE_COUNT[which]} distinct edges, got {list(edges)}"
        )
    if which == 1:
        i, j, k = edges
        return [(1, [DodgsonSpec.of([i], [j], [k]), DodgsonSpec.of([i, k], [j, k])])]
    if which == 2:
        i, j, k, l = edges
        return [(1, [DodgsonSpec.of([i, j], [k, l]), DodgsonSpec.of([i, k], [j, l])])]
    return five_invariant_factors(*edges)


def five_invariant_factors(
    i: int, j: int, k: int, l: int, m: int, sign: int = -1
) -> list[tuple[int, list[DodgsonSpec]]]:
    """Both products of the 5-invariant; ``sign`` joins them (``-1`` is the determinantal form)."""
    return [
        (1, [DodgsonSpec.of([i, j], [k, l], [m]), DodgsonSpec.of([i, k, m], [j, l, m])]),
        (sign, [DodgsonSpec.of([i, k], [j, l], [m]), DodgsonSpec.of([i, j, m], [k, l, m])]),
    ]


# -----------------------------------------------------------------------------
# Partition moves
# -----------------------------------------------------------------------------


def _splits(rest: Sequence[int], u: int, v: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    for mask in itertools.product((0, 1), repeat=len(rest)):
        side_u = [u] + [x for x, bit in zip(rest, mask, strict=True) if bit == 0]
        side_v = [v] + [x for x, bit in zip(rest, mask, strict=True) if bit == 1]
        yield tuple(side_u), tuple(side_v)


def contract_partition(partition: Partition, u: int, v: int) -> list[Partition]:
    """
    Partitions of ``H - e`` whose forests, together with ``e = uv``, give the
    ``partition``-forests of ``H`` that contain ``e``.
    """
    bu = next((idx for idx, b in enumerate(partition) if u in b), None)
    bv = next((idx for idx, b in enumerate(partition) if v in b), None)
    if bu is not None and bv is not None and bu != bv:
        return []
    if bu is not None or bv is not None:
        idx = bu if bu is not None else bv
        assert idx is not None
        choices = [idx]
    else:
        choices = list(range(len(partition)))
    out = []
    for idx in choices:
        block = partition[idx]
        others = [b for n, b in enumerate(partition) if n != idx]
        rest = [x for x in block if x != u and x != v]
        for side_u, side_v in _splits(rest, u, v):
            out.append(canonical_partition([*others, side_u, side_v]))
    return out


def isolate_vertex(partition: Partition, x: int) -> Partition | None:
    """Drop an isolated vertex: allowed only when it is a singleton block."""
    for idx, block in enumerate(partition):
        if x in block:
            if len(block) == 1:
                return partition[:idx] + partition[idx + 1 :]
            return None
    return None


# -----------------------------------------------------------------------------
# Linear combinations of products of forest polynomials
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ForestPolyExpr:
    """
    Linear combination of products of spanning forest polynomials.

    Each key is a tuple of partitions, one per factor, and all factors live on
    the same host: ``host`` restricted to the ``remaining`` edge ids and the
    ``live`` vertices. Coefficients are integers, reduced modulo ``modulus``
    when one is set.
    """

    host: LabeledGraph
    remaining: frozenset[int]
    live: frozenset[int]
    terms: Mapping[StateKey, int] = field(default_factory=dict)
    modulus: int | None = None

    @classmethod
    def create(
        cls,
        host: LabeledGraph,
        terms: Mapping[StateKey, int],
        remaining: Iterable[int] | None = None,
        live: Iterable[int] | None = None,
        modulus: int | None = None,
    ) -> ForestPolyExpr:
        """Normalise keys and remove vertices that are already isolated."""
        rem = frozenset(range(host.edge_count) if remaining is None else remaining)
        for e in rem:
            host.check_edge(e)
        alive = frozenset(range(host.vertex_count) if live is None else live)
        arities = {len(key) for key in terms}
        if len(arities) > 1:
            raise InvalidPartitionError(detail=f"Mixed factor counts {sorted(arities)}")
        normalized: dict[StateKey, int] = defaultdict(int)
        for key, coeff in terms.items():
            for partition in key:
                for block in partition:
                    for v in block:
                        if v not in alive:
                            raise InvalidPartitionError(detail=f"Vertex {v} is not in the host")
            normalized[tuple(canonical_partition(pt) for pt in key)] += coeff
        expr = cls(host, rem, alive, _clean(normalized, modulus), modulus)
        isolated = [v for v in sorted(alive) if expr.degree(v) == 0]
        return expr._remove_isolated(isolated)

    @property
    def arity(self) -> int:
        return len(next(iter(self.terms))) if self.terms else 0

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, v: int) -> int:
        return sum(1 for e in self.host.incidence[v] if e in self.remaining)

    def mentioned_vertices(self) -> frozenset[int]:
        return frozenset(v for key in self.terms for pt in key for block in pt for v in block)

    def scalar(self) -> int:
        """Value once every edge and vertex has been processed."""
        if self.remaining or self.live:
            raise PreconditionError(detail="Expression still has edges or vertices")
        return self.terms.get(tuple(() for _ in range(self.arity)), 0) if self.terms else 0

    def _remove_isolated(self, vertices: Iterable[int]) -> ForestPolyExpr:
        doomed = [v for v in vertices if v in self.live]
        if not doomed:
            return self
        out: dict[StateKey, int] = defaultdict(int)
        for key, coeff in self.terms.items():
            new_key: list[Partition] = []
            for partition in key:
                current: Partition | None = partition
                for v in doomed:
                    if current is None:
                        break
                    current = isolate_vertex(current, v)
                if current is None:
                    break
                new_key.append(current)
            else:
                out[tuple(new_key)] += coeff
        return ForestPolyExpr(
            self.host, self.remaining, self.live - frozenset(doomed), _clean(out, self.modulus),
            self.modulus,
        )

    def _after_edge(self, e: int, terms: Mapping[StateKey, int]) -> ForestPolyExpr:
        u, v = self.host.edges[e]
        expr = ForestPolyExpr(
            self.host, self.remaining - {e}, self.live, _clean(terms, self.modulus), self.modulus
        )
        return expr._remove_isolated([x for x in (u, v) if expr.degree(x) == 0])

    def subgraph(self) -> tuple[LabeledGraph, dict[int, int], list[int]]:
        """The live host as a standalone graph: ``(graph, vertex index, edge ids in order)``."""
        order = sorted(self.live)
        index = {v: n for n, v in enumerate(order)}
        edges = sorted(self.remaining)
        sub = LabeledGraph(
            len(order),
            tuple((index[self.host.edges[e][0]], index[self.host.edges[e][1]]) for e in edges),
        )
        return sub, index, edges

    def evaluate(self, point: Point, p: int) -> FpElement:
        """Evaluate by explicit forest enumeration (small hosts only)."""
        sub, index, edges = self.subgraph()
        sub_point = [int(point[e]) for e in edges]
        total = 0
        for key, coeff in self.terms.items():
            term = coeff
            for partition in key:
                local = VertexSubsetPartition.of([index[v] for v in b] for b in partition)
                term = term * int(eval_forest_poly(sub, local, sub_point, p)) % p
            total += term
        return FpElement(total, p)


def _clean(terms: Mapping[StateKey, int], modulus: int | None) -> dict[StateKey, int]:
    if modulus is None:
        return {k: c for k, c in terms.items() if c}
    out = {}
    for k, c in terms.items():
        r = c % modulus
        if r:
            out[k] = r
    return out


def assign_edge(
    expr: ForestPolyExpr, e: int, to_this_factor: bool | Sequence[bool]
) -> ForestPolyExpr:
    """
    Cut (``False``) or contract (``True``) edge ``e`` in each factor.

    The result lives on the host without ``e``; endpoints left isolated are
    removed (singleton parts disappear with them, anything else vanishes).
    """
    if e not in expr.remaining:
        raise InvalidEdgeError(e, expr.host.edge_count, reason="not in the host")
    choices = [to_this_factor] * expr.arity if isinstance(to_this_factor, bool) else list(to_this_factor)
    if expr.terms and len(choices) != expr.arity:
        raise PreconditionError(detail=f"{len(choices)} choices for {expr.arity} factors")
    u, v = expr.host.edges[e]
    out: dict[StateKey, int] = defaultdict(int)
    for key, coeff in expr.terms.items():
        options = [
            contract_partition(pt, u, v) if contract else [pt]
            for pt, contract in zip(key, choices, strict=True)
        ]
        for combo in itertools.product(*options):
            out[combo] += coeff
    return expr._after_edge(e, out)


def process_edge(expr: ForestPolyExpr, e: int, p: int) -> ForestPolyExpr:
    """
    Assign ``e`` so that it lies outside exactly ``p - 1`` of the ``2(p - 1)`` structures.

    Factors are treated as unordered: keys are re-sorted after the move.
    """
    if e not in expr.remaining:
        raise InvalidEdgeError(e, expr.host.edge_count, reason="not in the host")
    arity = expr.arity
    u, v = expr.host.edges[e]
    out: dict[StateKey, int] = defaultdict(int)
    contracted_sets = list(itertools.combinations(range(arity), p - 1)) if arity else []
    for key, coeff in expr.terms.items():
        contracted_cache = [contract_partition(pt, u, v) for pt in key]
        for chosen in contracted_sets:
            options = [contracted_cache[n] if n in chosen else [key[n]] for n in range(arity)]
            for combo in itertools.product(*options):
                out[tuple(sorted(combo))] += coeff
    return expr._after_edge(e, out)


def process_edges(expr: ForestPolyExpr, edges: Iterable[int], p: int) -> ForestPolyExpr:
    for e in edges:
        expr = process_edge(expr, e, p)
        if expr.is_zero:
            break
    return expr


def frontier_edge_order(host: LabeledGraph, remaining: Iterable[int]) -> list[int]:
    """
    Greedy edge order keeping the set of half-processed vertices small.

    Vertices are placed one at a time, each time choosing the vertex that
    leaves the fewest placed vertices with unprocessed edges; placing a vertex
    processes its edges to already placed vertices.
    """
    rem = sorted(set(remaining))
    adjacency: dict[int, list[int]] = defaultdict(list)
    for e in rem:
        a, b = host.edges[e]
        adjacency[a].append(e)
        adjacency[b].append(e)
    vertices = sorted(adjacency)
    placed: set[int] = set()
    open_count: dict[int, int] = {v: len(adjacency[v]) for v in vertices}
    order: list[int] = []

    def frontier_after(v: int) -> int:
        closing = defaultdict(int)
        for e in adjacency[v]:
            w = host.other_end(e, v)
            if w in placed:
                closing[w] += 1
        size = sum(1 for w in placed if open_count[w] - closing[w] > 0)
        own = open_count[v] - sum(closing.values())
        return size + (1 if own > 0 else 0)

    while len(placed) < len(vertices):
        touching = {host.other_end(e, w) for w in placed for e in adjacency[w]} - placed
        pool = sorted(touching) if touching else [v for v in vertices if v not in placed]
        best = min(pool, key=lambda v: (frontier_after(v), len(adjacency[v]), v))
        for e in adjacency[best]:
            w = host.other_end(e, best)
            if w in placed:
                order.append(e)
                open_count[w] -= 1
                open_count[best] -= 1
        placed.add(best)
    return order


def assignment_count(expr: ForestPolyExpr, p: int, order: Sequence[int] | None = None) -> int:
    """
    Number of edge assignments (weighted by coefficients) that leave every
    structure valid, i.e. the coefficient of ``prod(alpha_e^(p-1))`` in the
    product of factors.
    """
    edges = list(order) if order is not None else frontier_edge_order(expr.host, expr.remaining)
    if set(edges) != set(expr.remaining):
        raise PreconditionError(detail="Edge order must cover the remaining edges exactly")
    peak = len(expr.terms)
    for e in edges:
        expr = process_edge(expr, e, p)
        peak = max(peak, len(expr.terms))
        if expr.is_zero:
            logger.debug("assignment_count_vanished", edge=e)
            return 0
    logger.debug("assignment_count_done", peak_states=peak)
    return expr.scalar()


def kirchhoff_expr(
    host: LabeledGraph, remaining: Iterable[int] | None = None, modulus: int | None = None
) -> ForestPolyExpr:
    """Kirchhoff polynomial as the one-block forest polynomial on its lowest vertex."""
    if host.vertex_count == 0:
        raise PreconditionError(detail="Kirchhoff polynomial of the empty graph")
    return ForestPolyExpr.create(host, {(((0,),),): 1}, remaining=remaining, modulus=modulus)


def multiply(
    factors: Sequence[ForestPolyExpr], coeff: int = 1, modulus: int | None = None
) -> ForestPolyExpr:
    """Product of expressions on one host (arity adds up)."""
    first = factors[0]
    for f in factors[1:]:
        if f.host != first.host or f.remaining != first.remaining:
            raise PreconditionError(detail="Factors live on different hosts")
    live = frozenset.intersection(*(f.live for f in factors))
    terms: dict[StateKey, int] = defaultdict(int)
    for combo in itertools.product(*(f.terms.items() for f in factors)):
        key: tuple[Partition, ...] = tuple(pt for k, _ in combo for pt in k)
        value = coeff
        for _, c in combo:
            value *= c
        terms[key] += value
    return ForestPolyExpr.create(
        first.host, terms, remaining=first.remaining, live=live, modulus=modulus
    )


def add(exprs: Sequence[ForestPolyExpr], modulus: int | None = None) -> ForestPolyExpr:
    first = exprs[0]
    terms: dict[StateKey, int] = defaultdict(int)
    for expr in exprs:
        if expr.host != first.host or expr.remaining != first.remaining:
            raise PreconditionError(detail="Summands live on different hosts")
        for key, c in expr.terms.items():
            terms[key] += c
    live = frozenset.union(*(e.live for e in exprs))
    return ForestPolyExpr.create(
        first.host, terms, remaining=first.remaining, live=live, modulus=modulus
    )
