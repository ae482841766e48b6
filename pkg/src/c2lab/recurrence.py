"""
Transfer-matrix solver for recursively constructible graph families.

A family grows by appending a layer of ``width`` vertices together with a
fixed edge template, and deleting template edges of recent layers. Edges that
are never deleted are *permanent*; the permanent part ``X_n`` of ``G_n`` is
the host on which partition states live.

The c2 computation of ``G_m`` is reduced to spanning forest states on
``X_{m-1}`` (the seed), then layer by layer down to ``X_b`` with one fixed
transfer matrix, and finally evaluated on ``X_b`` by full edge assignment.
States only mention vertices of the top ``window`` layers and the base, and
are stored with offset labels so they do not depend on the level.
"""

from __future__ import annotations

import itertools
import re
import tomllib
from collections import defaultdict, deque
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Literal

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from c2lab.config import Settings, get_settings
from c2lab.engine import AssignmentProblem, c2_assign, c2_brute, run_method
from c2lab.exceptions import (
    BudgetExceededError,
    DegenerateEdgeChoiceError,
    EdgeCountError,
    ExperimentalFeatureError,
    FamilySpecError,
    InducedBoundaryError,
    NeighborhoodError,
    OverlapMismatchError,
    PreconditionError,
    StateHygieneError,
    StateOverflowError,
    TemplateError,
)
from c2lab.fp.linalg import (
    FpMatrix,
    check_prime,
    iterate_until_periodic,
    mat_vec,
    minimal_eventual_period,
)
from c2lab.graph.core import Edge, LabeledGraph, Partition, canonical_partition
from c2lab.models import C2Result, RecurrenceSolution, VerifiedValue
from c2lab.polys import (
    FORMULA_SIGN,
    ForestPolyExpr,
    assignment_count,
    formula_products,
    is_identically_zero,
    process_edges,
)

logger = structlog.get_logger(__name__)

StateTuple = tuple[Partition, ...]

_REF = re.compile(r"^(?:B:(?P<base>\d+)|L(?P<depth>\d+):(?P<index>\d+))$")
_DELETION = re.compile(r"^(?P<offset>\d+):(?P<edge>\d+)$")


# -----------------------------------------------------------------------------
# Spec file
# -----------------------------------------------------------------------------


class BaseSection(BaseModel):
    """The initial graph G_0."""

    vertices: int = Field(..., ge=1, description="Number of base vertices")
    edges: list[tuple[int, int]] = Field(default_factory=list)


class LayerSection(BaseModel):
    """The repeated layer and its edge and deletion templates."""

    width: int = Field(..., ge=1, description="Vertices added per layer")
    r: int = Field(..., ge=1, description="How many earlier layers a layer may touch")
    stride: int = Field(default=1, ge=1, description="Reported index step per layer")
    first_index: int = Field(default=0, description="Reported index of G_0")
    edges: list[tuple[str, str]] = Field(..., min_length=1)
    base_layers: list[list[str]] = Field(
        default_factory=list,
        description="Anchors: base_layers[q][i] stands for vertex i of layer -q ('-' drops the edge)",
    )
    deletions: list[str] = Field(
        default_factory=list,
        description="'i:t' deletes template edge t of the layer i steps back",
    )


class BoundarySection(BaseModel):
    vertices: list[str] | None = Field(
        default=None,
        description="Explicit boundary vertex references; checked against the window",
    )


class RecursiveFamilySpec(BaseModel):
    """A recursive family as read from its TOML file."""

    model_config = ConfigDict(extra="forbid")

    format: Literal[1]
    name: str
    description: str = ""
    base: BaseSection
    layer: LayerSection
    boundary: BoundarySection = Field(default_factory=BoundarySection)

    @classmethod
    def from_toml(cls, text: str, source: str = "<string>") -> RecursiveFamilySpec:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise FamilySpecError(detail=f"{source}: {e}") from e
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise FamilySpecError(detail=f"{source}: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> RecursiveFamilySpec:
        path = Path(path)
        return cls.from_toml(path.read_text(encoding="utf-8"), source=str(path))

    @classmethod
    def builtin(cls, name: str) -> RecursiveFamilySpec:
        """A spec shipped in ``c2lab/data/families``."""
        folder = resources.files("c2lab.data").joinpath("families")
        entry = folder.joinpath(f"{name}.toml")
        if not entry.is_file():
            raise FamilySpecError(detail=f"No built-in family {name!r}; have {builtin_families()}")
        return cls.from_toml(entry.read_text(encoding="utf-8"), source=f"{name}.toml")


def builtin_families() -> list[str]:
    folder = resources.files("c2lab.data").joinpath("families")
    return sorted(p.name.removesuffix(".toml") for p in folder.iterdir() if p.name.endswith(".toml"))


# -----------------------------------------------------------------------------
# Compiled template
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexRef:
    """``B:i`` (depth None) or ``L<depth>:i``."""

    depth: int | None
    index: int

    @classmethod
    def parse(cls, text: str) -> VertexRef:
        match = _REF.match(text.strip())
        if not match:
            raise TemplateError(detail=f"Bad vertex reference {text!r}; use 'B:i' or 'L<d>:i'")
        if match["base"] is not None:
            return cls(None, int(match["base"]))
        return cls(int(match["depth"]), int(match["index"]))

    def __str__(self) -> str:
        return f"B:{self.index}" if self.depth is None else f"L{self.depth}:{self.index}"


@dataclass(frozen=True)
class FamilyTemplate:
    """Validated, hashable form of a family spec plus its derived constants."""

    name: str
    base_count: int
    base_edges: tuple[Edge, ...]
    width: int
    r: int
    stride: int
    first_index: int
    edges: tuple[tuple[VertexRef, VertexRef], ...]
    base_layers: tuple[tuple[int | None, ...], ...]
    deletions: tuple[tuple[int, int], ...]

    @cached_property
    def transient(self) -> frozenset[int]:
        """Template edges that some later layer deletes."""
        return frozenset(t for _, t in self.deletions)

    @cached_property
    def first_deletion(self) -> Mapping[int, int]:
        """Smallest deletion offset per transient template edge."""
        out: dict[int, int] = {}
        for offset, t in self.deletions:
            out[t] = min(offset, out.get(t, offset))
        return out

    @cached_property
    def max_depth(self) -> int:
        return max(ref.depth or 0 for pair in self.edges for ref in pair)

    def edge_depth(self, t: int) -> int:
        return max(ref.depth or 0 for ref in self.edges[t])

    @cached_property
    def window(self) -> int:
        """Number of top layers (besides the base) a state may mention."""
        reach = [self.edge_depth(t) + self.first_deletion[t] - 1 for t in self.transient]
        return max([self.max_depth, 1, *reach])

    @cached_property
    def base_level(self) -> int:
        """Members above this level all look alike around the top layers."""
        return self.window + self.r + self.max_depth + 1

    def layer_vertex(self, layer: int, index: int) -> int:
        return self.base_count + (layer - 1) * self.width + index

    def layer_of(self, v: int) -> tuple[int, int]:
        """``(layer, index)``; base vertices are layer 0."""
        if v < self.base_count:
            return 0, v
        layer, index = divmod(v - self.base_count, self.width)
        return layer + 1, index

    def resolve(self, ref: VertexRef, layer: int) -> int | None:
        if ref.depth is None:
            return ref.index
        target = layer - ref.depth
        if target >= 1:
            return self.layer_vertex(target, ref.index)
        q = -target
        if q < len(self.base_layers):
            return self.base_layers[q][ref.index]
        return None

    # -------------------------------------------------------------------------
    # Offset labels
    # -------------------------------------------------------------------------

    def encode(self, v: int, top: int) -> int:
        layer, index = self.layer_of(v)
        if layer == 0:
            return v
        depth = top - layer
        if not 0 <= depth < self.window:
            raise StateHygieneError(
                detail=f"Vertex {v} (layer {layer}) is {depth} layers below the top layer {top}; "
                f"window is {self.window}"
            )
        return self.base_count + depth * self.width + index

    def decode(self, label: int, top: int) -> int:
        if label < self.base_count:
            return label
        depth, index = divmod(label - self.base_count, self.width)
        if depth >= self.window or top - depth < 1:
            raise StateHygieneError(detail=f"Label {label} does not fit below top layer {top}")
        return self.layer_vertex(top - depth, index)

    def encode_state(self, key: StateTuple, top: int) -> StateTuple:
        return tuple(
            sorted(
                canonical_partition([self.encode(v, top) for v in block] for block in partition)
                for partition in key
            )
        )

    def decode_state(self, state: StateTuple, top: int) -> StateTuple:
        return tuple(
            canonical_partition([self.decode(v, top) for v in block] for block in partition)
            for partition in state
        )


def compile_template(spec: RecursiveFamilySpec) -> FamilyTemplate:
    """Parse references and check everything that does not need a member graph."""
    layer = spec.layer
    edges = []
    for t, (a, b) in enumerate(layer.edges):
        pair = (VertexRef.parse(a), VertexRef.parse(b))
        for ref in pair:
            if ref.depth is None and ref.index >= spec.base.vertices:
                raise TemplateError(detail=f"Edge {t}: {ref} is not a base vertex")
            if ref.depth is not None and ref.index >= layer.width:
                raise TemplateError(detail=f"Edge {t}: {ref} is wider than the layer")
            if ref.depth is not None and ref.depth > layer.r:
                raise TemplateError(detail=f"Edge {t}: {ref} reaches more than r = {layer.r} layers back")
        if pair[0] == pair[1]:
            raise TemplateError(detail=f"Edge {t} is a self-loop")
        edges.append(pair)

    anchors = []
    for q, row in enumerate(layer.base_layers):
        if len(row) != layer.width:
            raise TemplateError(detail=f"base_layers[{q}] has {len(row)} entries, width is {layer.width}")
        resolved: list[int | None] = []
        for entry in row:
            if entry.strip() == "-":
                resolved.append(None)
                continue
            ref = VertexRef.parse(entry)
            if ref.depth is not None or ref.index >= spec.base.vertices:
                raise TemplateError(detail=f"Anchor {entry!r} must name a base vertex")
            resolved.append(ref.index)
        anchors.append(tuple(resolved))

    deletions = []
    for entry in layer.deletions:
        match = _DELETION.match(entry.strip())
        if not match:
            raise TemplateError(detail=f"Bad deletion {entry!r}; use 'i:t'")
        offset, t = int(match["offset"]), int(match["edge"])
        if not 1 <= offset <= layer.r:
            raise TemplateError(detail=f"Deletion {entry!r}: offset must be in 1..{layer.r}")
        if t >= len(edges):
            raise TemplateError(detail=f"Deletion {entry!r}: no template edge {t}")
        deletions.append((offset, t))

    for u, v in spec.base.edges:
        if not (0 <= u < spec.base.vertices and 0 <= v < spec.base.vertices) or u == v:
            raise TemplateError(detail=f"Bad base edge ({u}, {v})")

    template = FamilyTemplate(
        name=spec.name,
        base_count=spec.base.vertices,
        base_edges=tuple((u, v) for u, v in spec.base.edges),
        width=layer.width,
        r=layer.r,
        stride=layer.stride,
        first_index=layer.first_index,
        edges=tuple(edges),
        base_layers=tuple(anchors),
        deletions=tuple(deletions),
    )
    if spec.boundary.vertices is not None:
        declared = {VertexRef.parse(v) for v in spec.boundary.vertices}
        expected = {VertexRef(None, i) for i in range(template.base_count)} | {
            VertexRef(d, i) for d in range(template.r + 1) for i in range(template.width)
        }
        if declared != expected:
            raise TemplateError(
                detail="Boundary must list every base vertex and every vertex of L0..L{r}".replace(
                    "{r}", str(template.r)
                )
            )
    return template


# -----------------------------------------------------------------------------
# Members
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    """``G_n`` (or its permanent part) with the origin of every edge."""

    n: int
    graph: LabeledGraph
    provenance: tuple[tuple[int, int], ...]
    transient: tuple[bool, ...]

    def layer_edge_ids(self, layer: int) -> list[int]:
        return [e for e, (j, _) in enumerate(self.provenance) if j == layer]

    def transient_edge_ids(self) -> list[int]:
        return [e for e, flag in enumerate(self.transient) if flag]


@lru_cache(maxsize=256)
def materialize(template: FamilyTemplate, n: int, permanent_only: bool = False) -> FamilyMember:
    """
    Build ``G_n``: base edges first, then each layer's surviving template edges in order.

    Provenance is ``(layer, t)``; base edges are ``(0, position)``.
    """
    if n < 0:
        raise PreconditionError(detail=f"Member index {n} is negative")
    slots: dict[tuple[int, int], Edge] = {}
    order: list[tuple[int, int]] = []
    for pos, edge in enumerate(template.base_edges):
        slots[(0, pos)] = edge
        order.append((0, pos))
    for j in range(1, n + 1):
        for offset, t in template.deletions:
            slots.pop((j - offset, t), None)
        for t, (a, b) in enumerate(template.edges):
            u, v = template.resolve(a, j), template.resolve(b, j)
            if u is None or v is None:
                continue
            if u == v:
                raise TemplateError(detail=f"Edge {t} of layer {j} collapses onto vertex {u}")
            slots[(j, t)] = (u, v)
            order.append((j, t))
    kept = [
        key
        for key in order
        if key in slots and not (permanent_only and key[0] > 0 and key[1] in template.transient)
    ]
    graph = LabeledGraph(
        template.base_count + n * template.width, tuple(slots[key] for key in kept)
    )
    transient = tuple(j > 0 and t in template.transient for j, t in kept)
    return FamilyMember(n, graph, tuple(kept), transient)


# -----------------------------------------------------------------------------
# Validation
# -----------------------------------------------------------------------------


def _window_signature(template: FamilyTemplate, member: FamilyMember) -> list[tuple[int, int]]:
    top = member.n
    inside: dict[int, int] = {}
    for v in range(member.graph.vertex_count):
        layer, index = template.layer_of(v)
        if layer == 0:
            inside[v] = v
        elif top - layer <= template.r:
            inside[v] = template.base_count + (top - layer) * template.width + index
    return sorted(
        (min(inside[a], inside[b]), max(inside[a], inside[b]))
        for a, b in member.graph.edges
        if a in inside and b in inside
    )


def validate_family(spec: RecursiveFamilySpec | FamilyTemplate) -> FamilyTemplate:
    """
    Check the family conditions on a few members.

    Templates are checked first. Members ``r+1 .. r+3`` must keep new-layer
    neighbours inside the window and satisfy ``2|V| = |E| + 2``. The induced
    window graph must be the same at two consecutive levels far enough from
    the base that no anchor is involved, and every layer must add exactly
    ``2 * width`` edges net.
    """
    template = spec if isinstance(spec, FamilyTemplate) else compile_template(spec)
    r = template.r
    for n in range(r + 1, r + 4):
        member = materialize(template, n)
        g = member.graph
        for i in range(template.width):
            v = template.layer_vertex(n, i)
            for w in g.neighbors(v):
                layer, _ = template.layer_of(w)
                if layer != 0 and n - layer > r:
                    raise NeighborhoodError(
                        detail=f"G_{n}: vertex {v} of layer {n} is adjacent to layer {layer}"
                    )
        if 2 * g.vertex_count != g.edge_count + 2:
            raise EdgeCountError(n, g.vertex_count, g.edge_count)

    low = r + template.max_depth + 1
    if _window_signature(template, materialize(template, low)) != _window_signature(
        template, materialize(template, low + 1)
    ):
        raise InducedBoundaryError(detail=f"Induced window graph differs between G_{low} and G_{low + 1}")

    net = len(template.edges) - len(template.deletions)
    if net != 2 * template.width:
        raise TemplateError(
            detail=f"Each layer adds {net} edges net; 2|V| = |E| + 2 needs {2 * template.width}"
        )
    logger.debug(
        "family_validated",
        family=template.name,
        window=template.window,
        base_level=template.base_level,
    )
    return template


# -----------------------------------------------------------------------------
# Seed and transfer
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedResult:
    """Formula-1 states of ``G_m`` pushed down to ``X_{m-1}``, in offset labels."""

    level: int
    formula_edges: tuple[int, int, int]
    states: Mapping[StateTuple, int]
    sign: int


@dataclass(frozen=True)
class TransferSystem:
    """Reachable states, the transfer matrix on them, the seed vector and the output functional."""

    states: tuple[StateTuple, ...]
    matrix: FpMatrix
    seed: tuple[int, ...]
    functional: tuple[int, ...]
    sign: int
    base_level: int
    formula_edges: tuple[int, int, int]

    def predicted(self, k: int, p: int) -> int:
        """c2 of member ``base_level + 1 + k``."""
        vector = self.seed
        for _ in range(k):
            vector = mat_vec(self.matrix, vector)
        return self.sign * sum(a * b for a, b in zip(self.functional, vector, strict=True)) % p


def _template(spec: RecursiveFamilySpec | FamilyTemplate) -> FamilyTemplate:
    return spec if isinstance(spec, FamilyTemplate) else compile_template(spec)


def _check_characteristic(p: int, settings: Settings) -> None:
    check_prime(p)
    if p != 2 and not settings.experimental_odd_p:
        raise ExperimentalFeatureError(detail=f"Recurrence engine at p = {p} is experimental")


def _choose_formula_edges(g: LabeledGraph, pool: Iterable[int]) -> tuple[int, int, int]:
    for combo in itertools.combinations(sorted(pool), 3):
        _, factors = formula_products(1, combo)[0]
        if not any(is_identically_zero(g, spec) for spec in factors):
            return combo  # type: ignore[return-value]
    raise DegenerateEdgeChoiceError(detail="No nondegenerate formula edges among the top layer edges")


def seed_states(
    spec: RecursiveFamilySpec | FamilyTemplate, p: int, settings: Settings | None = None
) -> SeedResult:
    """
    States for ``G_m``, ``m = base_level + 1``.

    Formula-1 edges are taken from the top layer and the still-present
    transient edges; every other such edge is then assigned, which leaves
    products of forest polynomials on ``X_{m-1}``.
    """
    settings = settings or get_settings()
    template = _template(spec)
    _check_characteristic(p, settings)
    m = template.base_level + 1
    member = materialize(template, m)
    pool = sorted(set(member.layer_edge_ids(m)) | set(member.transient_edge_ids()))
    chosen = _choose_formula_edges(member.graph, pool)

    expr = AssignmentProblem.from_formula(member.graph, 1, chosen, p).to_expr(modulus=p)
    expr = process_edges(expr, [e for e in pool if e not in chosen], p)
    states: dict[StateTuple, int] = defaultdict(int)
    for key, coeff in expr.terms.items():
        states[template.encode_state(key, m - 1)] += coeff
    cleaned = {s: c % p for s, c in states.items() if c % p}
    num_vars = member.graph.edge_count - 3
    sign = FORMULA_SIGN[1] * (-1) ** (num_vars + 1) % p
    logger.info("seed_built", family=template.name, level=m, edges=chosen, states=len(cleaned))
    return SeedResult(m, chosen, cleaned, sign)


def process_layers(
    template: FamilyTemplate, state: StateTuple, p: int, level: int, layers: int = 1
) -> dict[StateTuple, int]:
    """Assign the permanent edges of ``layers`` top layers of ``X_level`` in one pass."""
    member = materialize(template, level, permanent_only=True)
    key = template.decode_state(state, level)
    expr = ForestPolyExpr.create(member.graph, {key: 1}, modulus=p)
    for j in range(level, level - layers, -1):
        expr = process_edges(expr, member.layer_edge_ids(j), p)
    column: dict[StateTuple, int] = defaultdict(int)
    for out_key, coeff in expr.terms.items():
        column[template.encode_state(out_key, level - layers)] += coeff
    return {s: c % p for s, c in column.items() if c % p}


def transfer_column(template: FamilyTemplate, state: StateTuple, p: int) -> dict[StateTuple, int]:
    """Image of one state under the layer map, computed at level ``base_level + 1``."""
    return process_layers(template, state, p, template.base_level + 1)


def output_value(template: FamilyTemplate, state: StateTuple, p: int) -> int:
    """Coefficient contributed by a state on ``X_b`` (full edge assignment)."""
    b = template.base_level
    member = materialize(template, b, permanent_only=True)
    expr = ForestPolyExpr.create(member.graph, {template.decode_state(state, b): 1}, modulus=p)
    return assignment_count(expr, p) % p


def transfer_matrix(
    spec: RecursiveFamilySpec | FamilyTemplate,
    p: int,
    seed: SeedResult | None = None,
    settings: Settings | None = None,
) -> TransferSystem:
    """
    Discover the states reachable from the seed and assemble the transfer matrix.

    Discovery is breadth first, one frontier at a time; columns of a frontier
    are computed in parallel. States are sorted before the matrix is built.
    """
    settings = settings or get_settings()
    template = _template(spec)
    _check_characteristic(p, settings)
    seed = seed or seed_states(template, p, settings)

    columns: dict[StateTuple, dict[StateTuple, int]] = {}
    discovered: set[StateTuple] = set(seed.states)
    if len(discovered) > settings.state_cap:
        raise StateOverflowError(settings.state_cap)
    frontier = deque(sorted(seed.states))
    with ThreadPoolExecutor(max_workers=settings.threads) as pool:
        while frontier:
            batch = list(frontier)
            frontier.clear()
            for state, column in zip(
                batch, pool.map(lambda s: transfer_column(template, s, p), batch), strict=True
            ):
                columns[state] = column
                for image in sorted(column):
                    if image not in discovered:
                        discovered.add(image)
                        frontier.append(image)
                        if len(discovered) > settings.state_cap:
                            raise StateOverflowError(settings.state_cap)
        states = tuple(sorted(discovered))
        index = {s: i for i, s in enumerate(states)}
        functional = tuple(pool.map(lambda s: output_value(template, s, p), states))

    matrix_columns = []
    for s in states:
        col = [0] * len(states)
        for image, coeff in columns[s].items():
            col[index[image]] = coeff
        matrix_columns.append(col)
    matrix = FpMatrix.from_columns(matrix_columns, len(states), p)
    seed_vector = tuple(seed.states.get(s, 0) for s in states)
    logger.info(
        "transfer_matrix_built",
        family=template.name,
        states=len(states),
        nonzero=sum(len(c) for c in columns.values()),
    )
    return TransferSystem(
        states, matrix, seed_vector, functional, seed.sign, template.base_level, seed.formula_edges
    )


# -----------------------------------------------------------------------------
# Solving
# -----------------------------------------------------------------------------


def direct_c2(g: LabeledGraph, p: int, settings: Settings) -> C2Result:
    """c2 of a single member: edge assignment or formula counting, falling back to brute force."""
    try:
        if p == 2:
            return c2_assign(g)
        return run_method(g, p, "formula1", settings=settings)
    except PreconditionError:
        return c2_brute(g, p, settings)


def solve_family(
    spec: RecursiveFamilySpec | FamilyTemplate, p: int, settings: Settings | None = None
) -> RecurrenceSolution:
    """
    c2 for every member as an eventually periodic sequence.

    Members from the first computable one up to the warmup bound are computed
    directly; members above the base level are predicted by the transfer
    system, and both must agree wherever they overlap.
    """
    settings = settings or get_settings()
    template = validate_family(_template(spec))
    _check_characteristic(p, settings)
    system = transfer_matrix(template, p, settings=settings)
    b = system.base_level

    preperiod_vectors, period_vectors = iterate_until_periodic(system.matrix, system.seed)
    orbit = [*preperiod_vectors, *period_vectors]

    def predicted(k: int) -> int:
        if k < len(orbit):
            vector = orbit[k]
        else:
            vector = period_vectors[(k - len(preperiod_vectors)) % len(period_vectors)]
        return system.sign * sum(a * x for a, x in zip(system.functional, vector, strict=True)) % p

    offset: int | None = None
    direct: dict[int, int] = {}
    n = 0
    while offset is None:
        member = materialize(template, n)
        if member.graph.vertex_count >= 3:
            try:
                direct[n] = direct_c2(member.graph, p, settings).value
                offset = n
            except (PreconditionError, BudgetExceededError) as e:
                logger.debug("direct_skipped", n=n, reason=str(e))
        if offset is None:
            n += 1
            if n > b:
                raise FamilySpecError(detail=f"No member up to {b} admits a direct computation")
    upper = max(b + settings.overlap, offset + template.r + 1 + settings.warmup_extra)
    for n in range(offset + 1, upper + 1):
        direct[n] = direct_c2(materialize(template, n).graph, p, settings).value

    verified = []
    for n in range(offset, upper + 1):
        guess = predicted(n - b - 1) if n > b else None
        if guess is not None and guess != direct[n]:
            raise OverlapMismatchError(n, direct[n], guess)
        verified.append(
            VerifiedValue(n=n, index=template.first_index + template.stride * n, direct=direct[n], predicted=guess)
        )

    periodic_start = b + 1 + len(preperiod_vectors)
    needed = periodic_start + 2 * len(period_vectors)
    values = [direct[n] if n <= b else predicted(n - b - 1) for n in range(offset, needed)]
    start, length = minimal_eventual_period(values, periodic_start - offset, len(period_vectors))
    solution = RecurrenceSolution(
        family=template.name,
        p=p,
        offset=offset,
        preperiod=values[:start],
        period=values[start : start + length],
        first_index=template.first_index,
        stride=template.stride,
        base_level=b,
        state_count=len(system.states),
        formula_edges=list(system.formula_edges),
        verified=verified,
    )
    logger.info(
        "family_solved",
        family=template.name,
        preperiod=solution.preperiod,
        period=solution.period,
        states=len(system.states),
    )
    return solution
