"""
c2 computation.

Three routes to the same residue:

* ``c2_brute`` counts the zeros of the Kirchhoff polynomial directly,
* ``c2_formula`` counts the zeros of a product of Dodgson polynomials
  (or, with ``engine="assign"``, extracts the coefficient of
  ``prod(alpha_e^(p-1))`` in its ``(p-1)``-th power),
* ``c2_assign_mod2`` counts edge assignments between two spanning
  structures at p = 2.

Sign conventions: ``[F]_p`` is the number of zeros of F in F_p^N and the
coefficient ``c`` of ``prod(x_i^(p-1))`` in ``F^(p-1)`` satisfies
``[F]_p = (-1)^(N+1) * c (mod p)`` when ``deg F = N``.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np
import structlog
import sympy

from c2lab.config import Settings, get_settings
from c2lab.exceptions import (
    BudgetExceededError,
    CrossCheckError,
    DegenerateEdgeChoiceError,
    DegreeMismatchError,
    FactorMismatchError,
    NonDivisibleCountError,
    PreconditionError,
    UnsupportedCharacteristicError,
)
from c2lab.fp.linalg import check_prime
from c2lab.graph.core import LabeledGraph, forest_search
from c2lab.models import C2Result
from c2lab.polys import (
    FORMULA_EDGE_COUNT,
    FORMULA_SIGN,
    DodgsonSpec,
    Evaluator,
    ForestPolyExpr,
    add,
    assignment_count,
    decompose,
    dodgson_evaluator,
    five_invariant_factors,
    formula_products,
    is_identically_zero,
    kirchhoff_expr,
    multiply,
    product_evaluator,
)

logger = structlog.get_logger(__name__)

Strategy = Literal["frontier", "enumerate"]
FactorDescriptor = ForestPolyExpr | DodgsonSpec | Literal["kirchhoff"]

# lexicographic edge choices tried before giving up
MAX_EDGE_CHOICES = 20_000


# -----------------------------------------------------------------------------
# Point counting
# -----------------------------------------------------------------------------


def _digits(indices: np.ndarray, num_vars: int, p: int) -> np.ndarray:
    # coordinate 0 is the most significant digit
    points = np.empty((indices.shape[0], num_vars), dtype=np.int64)
    rest = indices.copy()
    for col in range(num_vars - 1, -1, -1):
        points[:, col] = rest % p
        rest //= p
    return points


def count_points(
    evaluator: Evaluator,
    num_vars: int,
    p: int,
    settings: Settings | None = None,
) -> int:
    """
    Number of zeros of a polynomial on F_p^N.

    ``evaluator`` maps a ``(B, N)`` int64 array of residues to ``B`` residues.
    Points are enumerated in blocks of ``settings.batch_size`` consecutive
    linear indices; blocks are independent, so the total is the same for every
    thread count.
    """
    settings = settings or get_settings()
    check_prime(p)
    total = p**num_vars
    if total > settings.budget:
        raise BudgetExceededError(total, settings.budget)
    if num_vars == 0:
        return int(evaluator(np.zeros((1, 0), dtype=np.int64))[0] % p == 0)

    step = settings.batch_size
    starts = range(0, total, step)

    def zeros_in(start: int) -> int:
        indices = np.arange(start, min(start + step, total), dtype=np.int64)
        values = evaluator(_digits(indices, num_vars, p))
        return int(np.count_nonzero(values % p == 0))

    if settings.threads == 1 or len(starts) == 1:
        count = sum(zeros_in(s) for s in starts)
    else:
        with ThreadPoolExecutor(max_workers=settings.threads) as pool:
            count = sum(pool.map(zeros_in, starts))
    logger.debug("count_points_done", p=p, num_vars=num_vars, zeros=count)
    return count


def polynomial_evaluator(poly: sympy.Poly, p: int) -> Evaluator:
    """Vectorised evaluator for a sympy polynomial with integer coefficients."""
    terms = [(tuple(monom), int(coeff) % p) for monom, coeff in poly.terms()]

    def evaluate(points: np.ndarray) -> np.ndarray:
        total = np.zeros(points.shape[0], dtype=np.int64)
        for monom, coeff in terms:
            term = np.full(points.shape[0], coeff, dtype=np.int64)
            for col, exp in enumerate(monom):
                for _ in range(exp):
                    term = term * points[:, col] % p
            total = (total + term) % p
        return total

    return evaluate


# -----------------------------------------------------------------------------
# Brute force
# -----------------------------------------------------------------------------


def c2_brute(g: LabeledGraph, p: int, settings: Settings | None = None) -> C2Result:
    """c2 from the zero count of the Kirchhoff polynomial over all of F_p^E."""
    if g.vertex_count < 3:
        raise PreconditionError(detail=f"c2 needs at least 3 vertices, graph has {g.vertex_count}")
    evaluator, variables = dodgson_evaluator(g, DodgsonSpec(), p)
    count = count_points(evaluator, len(variables), p, settings)
    if count % (p * p):
        raise NonDivisibleCountError(count, p)
    value = (count // (p * p)) % p
    logger.info("c2_brute", p=p, edges=g.edge_count, point_count=count, value=value)
    return C2Result(p=p, method="brute", value=value, diagnostics={"point_count": count})


# -----------------------------------------------------------------------------
# Dodgson-product formulas
# -----------------------------------------------------------------------------


def check_edge_count_condition(g: LabeledGraph) -> None:
    if 2 + g.edge_count > 2 * g.vertex_count:
        raise PreconditionError(
            detail=f"2+|E| <= 2|V| violated: |E| = {g.edge_count}, |V| = {g.vertex_count}",
            user_message="2+|E| <= 2|V| violated",
        )


def formula_degree(g: LabeledGraph, which: int) -> tuple[int, int]:
    """``(degree, number of variables)`` of the polynomial F of a formula."""
    loops = g.edge_count - g.vertex_count + 1
    # each factor has degree loops - |I| and the |I| add up to the number of formula edges
    return 2 * loops - FORMULA_EDGE_COUNT[which], g.edge_count - FORMULA_EDGE_COUNT[which]


def default_edge_choice(g: LabeledGraph, which: int) -> tuple[int, ...]:
    """
    Lexicographically first edge tuple whose Dodgson factors are all nonzero.

    For the 5-invariant only the first product has to be nonzero; the second
    may vanish and then simply contributes nothing.
    """
    size = FORMULA_EDGE_COUNT.get(which)
    if size is None:
        raise PreconditionError(detail=f"Unknown formula {which}")
    if g.edge_count < size:
        raise DegenerateEdgeChoiceError(detail=f"Formula {which} needs {size} edges")
    for tried, combo in enumerate(itertools.combinations(range(g.edge_count), size)):
        if tried >= MAX_EDGE_CHOICES:
            break
        _, factors = formula_products(which, combo)[0]
        if not any(is_identically_zero(g, spec) for spec in factors):
            logger.debug("default_edge_choice", formula=which, edges=combo, tried=tried + 1)
            return combo
    raise DegenerateEdgeChoiceError(
        detail=f"No nondegenerate edge choice for formula {which} among the first {MAX_EDGE_CHOICES}"
    )


def _formula_sign(which: int, p: int) -> int:
    return FORMULA_SIGN[which] % p


def c2_formula(
    g: LabeledGraph,
    p: int,
    which: int,
    edges: Sequence[int] | None = None,
    engine: Literal["count", "assign"] = "count",
    settings: Settings | None = None,
) -> C2Result:
    """
    c2 from one of the three Dodgson-product formulas.

    ``engine="count"`` counts zeros of F over F_p^N; ``engine="assign"``
    extracts the top coefficient of ``F^(p-1)`` by edge assignment, which
    needs ``deg F = N``.
    """
    check_prime(p)
    check_edge_count_condition(g)
    chosen = tuple(edges) if edges is not None else default_edge_choice(g, which)
    degree, num_vars = formula_degree(g, which)
    if degree > num_vars or (engine == "assign" and degree != num_vars):
        raise DegreeMismatchError(degree, num_vars)

    if engine == "assign":
        problem = AssignmentProblem.from_formula(g, which, chosen, p)
        coeff = coefficient_by_assignment(problem)
        zeros = (-1) ** (num_vars + 1) * coeff % p
        value = _formula_sign(which, p) * zeros % p
        return C2Result(
            p=p,
            method="assign",
            value=value,
            formula=which,  # type: ignore[arg-type]
            edge_choice=list(chosen),
            strategy="frontier",
            diagnostics={"assignment_count": coeff, "num_vars": num_vars},
        )

    products = formula_products(which, chosen)
    evaluator, variables = product_evaluator(g, products, p)
    count = count_points(evaluator, len(variables), p, settings)
    diagnostics = {"point_count": count, "num_vars": num_vars}
    if which == 3 and p > 2:
        plus, _ = product_evaluator(g, five_invariant_factors(*chosen, sign=1), p)
        diagnostics["point_count_plus"] = count_points(plus, len(variables), p, settings)
    value = _formula_sign(which, p) * count % p
    logger.info("c2_formula", p=p, formula=which, edges=chosen, point_count=count, value=value)
    return C2Result(
        p=p,
        method="coeff",
        value=value,
        formula=which,  # type: ignore[arg-type]
        edge_choice=list(chosen),
        diagnostics=diagnostics,
    )


# -----------------------------------------------------------------------------
# Edge assignment
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class AssignmentProblem:
    """
    Signed products of ``2(p-1)`` spanning forest expressions on one host.

    The quantity of interest is the number of ways to place every remaining
    host edge outside exactly ``p - 1`` of the structures of a product,
    weighted by the coefficients.
    """

    host: LabeledGraph
    remaining: frozenset[int]
    products: tuple[tuple[int, tuple[ForestPolyExpr, ...]], ...]
    p: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        arity = 2 * (self.p - 1)
        for _, factors in self.products:
            if len(factors) != arity:
                raise FactorMismatchError(
                    detail=f"{len(factors)} factors given, p = {self.p} needs {arity}"
                )
            for f in factors:
                if f.arity not in (0, 1):
                    raise FactorMismatchError(detail="Factors must be single forest polynomials")
                if f.host != self.host or f.remaining != self.remaining:
                    raise FactorMismatchError(detail="Factor lives on a different host")

    @property
    def num_vars(self) -> int:
        return len(self.remaining)

    @classmethod
    def from_factors(
        cls,
        host: LabeledGraph,
        factors: Sequence[FactorDescriptor],
        p: int,
        remaining: frozenset[int] | None = None,
    ) -> AssignmentProblem:
        """A single product; ``"kirchhoff"`` stands for the Kirchhoff polynomial of the host."""
        rem = remaining if remaining is not None else frozenset(range(host.edge_count))
        exprs = []
        for f in factors:
            if isinstance(f, ForestPolyExpr):
                exprs.append(f)
            elif isinstance(f, DodgsonSpec):
                exprs.append(decompose(host, f, p))
            elif f == "kirchhoff":
                exprs.append(kirchhoff_expr(host, rem, modulus=p))
            else:
                raise FactorMismatchError(detail=f"Unknown factor descriptor {f!r}")
        return cls(host, rem, ((1, tuple(exprs)),), p)

    @classmethod
    def from_formula(
        cls, g: LabeledGraph, which: int, edges: Sequence[int], p: int
    ) -> AssignmentProblem:
        """
        Expand ``F^(p-1)`` for the formula's F into products of decomposed factors.

        For the 5-invariant ``(AB - CD)^(p-1)`` is expanded binomially.
        """
        products = formula_products(which, edges)
        remaining = frozenset(e for e in range(g.edge_count) if e not in set(edges))
        decomposed = [
            (sign, tuple(decompose(g, spec, p) for spec in specs)) for sign, specs in products
        ]
        m = p - 1
        expanded: list[tuple[int, tuple[ForestPolyExpr, ...]]] = []
        if len(decomposed) == 1:
            sign, factors = decomposed[0]
            expanded.append((sign**m, tuple(f for f in factors for _ in range(m))))
        else:
            (s1, ab), (s2, cd) = decomposed
            for t in range(m + 1):
                coeff = sympy.binomial(m, t) * s1 ** (m - t) * s2**t
                factors = tuple(f for f in ab for _ in range(m - t)) + tuple(
                    f for f in cd for _ in range(t)
                )
                expanded.append((int(coeff), factors))
        return cls(g, remaining, tuple(expanded), p)

    def to_expr(self, modulus: int | None = None) -> ForestPolyExpr:
        """The whole problem as one expression of arity ``2(p-1)``."""
        parts = [multiply(factors, coeff=c, modulus=modulus) for c, factors in self.products]
        return add(parts, modulus=modulus)


def coefficient_by_assignment(
    problem: AssignmentProblem,
    strategy: Strategy = "frontier",
    order: Sequence[int] | None = None,
) -> int:
    """
    Weighted number of valid edge assignments.

    ``frontier`` runs the edge-by-edge dynamic programme with exact integers;
    ``enumerate`` (p = 2 only) lists the structures of one factor and checks
    that the complementary edge set is a structure of the other.
    """
    if strategy == "frontier":
        return assignment_count(problem.to_expr(modulus=None), problem.p, order)
    if strategy == "enumerate":
        if problem.p != 2:
            raise UnsupportedCharacteristicError(problem.p)
        return sum(
            coeff * _count_complementary_pairs(factors[0], factors[1])
            for coeff, factors in problem.products
        )
    raise PreconditionError(detail=f"Unknown strategy {strategy!r}")


def _count_complementary_pairs(first: ForestPolyExpr, second: ForestPolyExpr) -> int:
    if len(second.terms) < len(first.terms):
        first, second = second, first
    sub, index, edges = first.subgraph()
    all_local = frozenset(range(len(edges)))
    total = 0
    for (p1,), c1 in first.terms.items():
        blocks1 = tuple(tuple(index[v] for v in b) for b in p1)
        for forest in forest_search(sub, blocks1, all_local):
            complement = all_local - forest
            for (p2,), c2 in second.terms.items():
                blocks2 = tuple(tuple(index[v] for v in b) for b in p2)
                if len(complement) != sub.vertex_count - len(blocks2):
                    continue
                if next(forest_search(sub, blocks2, complement), None) is not None:
                    total += c1 * c2
    return total


def c2_assign_mod2(
    problem: AssignmentProblem,
    strategy: Strategy = "frontier",
    formula: int = 1,
    edge_choice: Sequence[int] | None = None,
) -> C2Result:
    """
    c2 at p = 2 as the parity of the number of complementary structure pairs.
    """
    if problem.p != 2:
        raise UnsupportedCharacteristicError(problem.p)
    count = coefficient_by_assignment(problem, strategy)
    value = count % 2
    logger.info("c2_assign", strategy=strategy, assignment_count=count, value=value)
    return C2Result(
        p=2,
        method="assign",
        value=value,
        formula=formula,  # type: ignore[arg-type]
        edge_choice=list(edge_choice) if edge_choice is not None else None,
        strategy=strategy,
        diagnostics={"assignment_count": count},
    )


def c2_assign(
    g: LabeledGraph,
    which: int = 1,
    edges: Sequence[int] | None = None,
    strategy: Strategy = "frontier",
) -> C2Result:
    """c2 at p = 2 by edge assignment on the decomposed factors of a formula."""
    check_edge_count_condition(g)
    chosen = tuple(edges) if edges is not None else default_edge_choice(g, which)
    degree, num_vars = formula_degree(g, which)
    if degree != num_vars:
        raise DegreeMismatchError(degree, num_vars)
    problem = AssignmentProblem.from_formula(g, which, chosen, 2)
    return c2_assign_mod2(problem, strategy, formula=which, edge_choice=chosen)


# -----------------------------------------------------------------------------
# Coefficient lemma
# -----------------------------------------------------------------------------


def coeff_lemma_check(
    poly: sympy.Poly | sympy.Expr,
    num_vars: int,
    p: int,
    settings: Settings | None = None,
) -> bool:
    """
    Compare the coefficient of ``prod(x_i^(p-1))`` in ``F^(p-1)`` with ``[F]_p``.

    Requires ``deg F = N``; the comparison uses ``[F]_p = (-1)^(N+1) c (mod p)``.
    """
    check_prime(p)
    if not isinstance(poly, sympy.Poly):
        gens = sympy.symbols(f"x1:{num_vars + 1}")
        poly = sympy.Poly(poly, *gens)
    if len(poly.gens) != num_vars:
        raise PreconditionError(detail=f"Polynomial has {len(poly.gens)} variables, expected {num_vars}")
    if poly.total_degree() != num_vars:
        raise DegreeMismatchError(poly.total_degree(), num_vars)
    power = poly ** (p - 1)
    coeff = int(power.coeff_monomial(tuple([p - 1] * num_vars))) % p
    zeros = count_points(polynomial_evaluator(poly, p), num_vars, p, settings)
    return ((-1) ** (num_vars + 1) * coeff - zeros) % p == 0


# -----------------------------------------------------------------------------
# Cross-checking
# -----------------------------------------------------------------------------

Method = Literal["brute", "formula1", "formula2", "formula3", "assign"]
ALL_METHODS: tuple[Method, ...] = ("brute", "formula1", "formula2", "formula3", "assign")


def run_method(
    g: LabeledGraph,
    p: int,
    method: Method,
    edges: Sequence[int] | None = None,
    settings: Settings | None = None,
) -> C2Result:
    """Dispatch one named method; formulas fall back to edge assignment when counting is over budget."""
    settings = settings or get_settings()
    if method == "brute":
        return c2_brute(g, p, settings)
    if method == "assign":
        if p != 2:
            which = 1
            return c2_formula(g, p, which, edges, engine="assign", settings=settings)
        return c2_assign(g, 1, edges)
    which = int(method[-1])
    num_vars = g.edge_count - FORMULA_EDGE_COUNT[which]
    engine: Literal["count", "assign"] = "count" if p**num_vars <= settings.budget else "assign"
    return c2_formula(g, p, which, edges, engine=engine, settings=settings)


def feasible_methods(g: LabeledGraph, p: int, settings: Settings | None = None) -> list[Method]:
    """Methods whose preconditions hold and whose counting fits the budget."""
    settings = settings or get_settings()
    methods: list[Method] = []
    if g.vertex_count >= 3 and p**g.edge_count <= settings.budget:
        methods.append("brute")
    if 2 + g.edge_count == 2 * g.vertex_count:
        for which in (1, 2, 3):
            num_vars = g.edge_count - FORMULA_EDGE_COUNT[which]
            if p**num_vars <= settings.budget or p == 2:
                methods.append(f"formula{which}")  # type: ignore[arg-type]
        if p == 2:
            methods.append("assign")
    return methods


def cross_check(
    g: LabeledGraph,
    p: int,
    methods: Sequence[Method] | None = None,
    settings: Settings | None = None,
) -> dict[str, C2Result]:
    """Run several methods and require identical residues."""
    chosen = list(methods) if methods is not None else feasible_methods(g, p, settings)
    if not chosen:
        raise PreconditionError(detail="No feasible method for this graph and budget")
    results = {m: run_method(g, p, m, settings=settings) for m in chosen}
    values = {m: r.value for m, r in results.items()}
    if len(set(values.values())) > 1:
        raise CrossCheckError(values)
    return results
