"""
Hypothesis strategies shared by the test modules.
"""

import sympy
from hypothesis import strategies as st

from c2lab.graph.core import LabeledGraph, canonical_partition
from c2lab.polys import DodgsonSpec


@st.composite
def connected_graphs(draw, min_vertices=2, max_vertices=5, max_edges=8):
    """Connected multigraphs without self-loops: a random tree plus extra edges."""
    n = draw(st.integers(min_value=min_vertices, max_value=max_vertices))
    edges = []
    for v in range(1, n):
        u = draw(st.integers(min_value=0, max_value=v - 1))
        edges.append((u, v) if draw(st.booleans()) else (v, u))
    extra = draw(st.integers(min_value=0, max_value=max(0, max_edges - len(edges))))
    for _ in range(extra):
        a = draw(st.integers(min_value=0, max_value=n - 1))
        b = draw(st.integers(min_value=0, max_value=n - 2))
        if b >= a:
            b += 1
        edges.append((a, b))
    order = draw(st.permutations(range(len(edges))))
    return LabeledGraph(n, tuple(edges[i] for i in order))


@st.composite
def graphs_with_dodgson(draw, max_vertices=5, max_edges=8):
    """A connected graph together with a valid Dodgson spec on it."""
    g = draw(connected_graphs(min_vertices=3, max_vertices=max_vertices, max_edges=max_edges))
    ids = list(range(g.edge_count))
    size = draw(st.integers(min_value=0, max_value=min(2, g.edge_count // 2)))
    i = draw(st.lists(st.sampled_from(ids), min_size=size, max_size=size, unique=True))
    j = draw(st.lists(st.sampled_from(ids), min_size=size, max_size=size, unique=True))
    free = [e for e in ids if e not in i and e not in j]
    k = draw(st.lists(st.sampled_from(free), max_size=1, unique=True)) if free else []
    return g, DodgsonSpec.of(i, j, k)


@st.composite
def points(draw, count, p):
    """A point of F_p^count as a list of residues."""
    return draw(st.lists(st.integers(min_value=0, max_value=p - 1), min_size=count, max_size=count))


@st.composite
def homogeneous_polys(draw, max_vars=5, max_terms=4):
    """A polynomial in x1..xN, homogeneous of degree N with positive coefficients, and N."""
    n = draw(st.integers(min_value=1, max_value=max_vars))
    gens = sympy.symbols(f"x1:{n + 1}")
    expr = sympy.Integer(0)
    for _ in range(draw(st.integers(min_value=1, max_value=max_terms))):
        coeff = draw(st.integers(min_value=1, max_value=4))
        factors = draw(st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n))
        expr += coeff * sympy.Mul(*(gens[i] for i in factors))
    return sympy.Poly(expr, *gens), n


@st.composite
def vertex_partitions(draw, vertex_count, max_marked=4):
    """A canonical partition of a nonempty subset of range(vertex_count)."""
    marked = draw(
        st.lists(
            st.integers(min_value=0, max_value=vertex_count - 1),
            min_size=1,
            max_size=min(max_marked, vertex_count),
            unique=True,
        )
    )
    blocks: dict[int, list[int]] = {}
    for v in marked:
        blocks.setdefault(draw(st.integers(min_value=0, max_value=len(marked) - 1)), []).append(v)
    return canonical_partition(blocks.values())
