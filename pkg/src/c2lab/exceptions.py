"""
Custom exceptions for c2lab.

Provides structured error handling with error codes, user-facing messages and
CLI exit codes.
"""


class C2LabError(Exception):
    """Base exception for c2lab errors."""

    exit_code: int = 1
    error_code: str = "INTERNAL_ERROR"
    user_message: str = "An unexpected error occurred"

    def __init__(
        self,
        detail: str | None = None,
        user_message: str | None = None,
    ):
        self.detail = detail or self.user_message
        if user_message:
            self.user_message = user_message
        super().__init__(self.detail)

    def to_dict(self) -> dict[str, str]:
        """Structured form used in reports and logs."""
        return {
            "error_code": self.error_code,
            "message": self.user_message,
            "detail": self.detail,
        }


# -----------------------------------------------------------------------------
# Graphs
# -----------------------------------------------------------------------------


class GraphError(C2LabError):
    """Invalid graph construction or graph operation."""

    exit_code = 2
    error_code = "GRAPH_ERROR"
    user_message = "Invalid graph"


class SelfLoopError(GraphError):
    """A self-loop was given to a graph constructor."""

    error_code = "SELF_LOOP"

    def __init__(self, edge_id: int, vertex: int):
        self.edge_id = edge_id
        self.vertex = vertex
        super().__init__(
            detail=f"Edge {edge_id} is a self-loop at vertex {vertex}",
            user_message="Self-loops are not allowed",
        )


class InvalidVertexError(GraphError):
    """A vertex id is out of range."""

    error_code = "INVALID_VERTEX"

    def __init__(self, vertex: int, vertex_count: int):
        self.vertex = vertex
        super().__init__(
            detail=f"Vertex {vertex} is not in range 0..{vertex_count - 1}",
            user_message=f"Invalid vertex {vertex}",
        )


class InvalidEdgeError(GraphError):
    """An edge id is out of range or repeated."""

    error_code = "INVALID_EDGE"

    def __init__(self, edge_id: int, edge_count: int, reason: str = "out of range"):
        self.edge_id = edge_id
        super().__init__(
            detail=f"Edge {edge_id} is invalid ({reason}); graph has {edge_count} edges",
            user_message=f"Invalid edge {edge_id}",
        )


class CycleCollapseError(GraphError):
    """Contracting the selected edges would collapse a cycle into a self-loop."""

    error_code = "CYCLE_COLLAPSE"
    user_message = "The contracted edge set contains a cycle"

    def __init__(self, edge_id: int):
        self.edge_id = edge_id
        super().__init__(detail=f"Contracting edge {edge_id} closes a cycle")


class InvalidPartitionError(GraphError):
    """A vertex partition has overlapping, empty or out-of-range blocks."""

    error_code = "INVALID_PARTITION"
    user_message = "Invalid vertex partition"


class GraphFormatError(GraphError):
    """Graph text could not be parsed."""

    error_code = "GRAPH_FORMAT"

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        super().__init__(
            detail=f"Line {line_number}: {reason}",
            user_message="Malformed graph file",
        )


class NotConnectedError(GraphError):
    """Operation requires a connected graph."""

    error_code = "NOT_CONNECTED"
    user_message = "The graph must be connected"


# -----------------------------------------------------------------------------
# Finite field arithmetic
# -----------------------------------------------------------------------------


class NotPrimeError(C2LabError):
    """The requested characteristic is not a prime."""

    exit_code = 2
    error_code = "NOT_PRIME"

    def __init__(self, p: int):
        self.p = p
        super().__init__(
            detail=f"{p} is not a prime in range 2..2^31",
            user_message=f"p = {p} must be a prime",
        )


class DimensionMismatchError(C2LabError):
    """Matrix or vector shapes do not match."""

    exit_code = 2
    error_code = "DIMENSION_MISMATCH"
    user_message = "Matrix dimensions do not match"


# -----------------------------------------------------------------------------
# Counting and c2 computation
# -----------------------------------------------------------------------------


class BudgetExceededError(C2LabError):
    """Point enumeration would exceed the configured budget."""

    exit_code = 3
    error_code = "BUDGET_EXCEEDED"

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            detail=f"{required} evaluations required, budget is {budget}",
            user_message="Point counting exceeds the configured budget; raise --budget",
        )


class UnsupportedCharacteristicError(C2LabError):
    """Operation is only defined for a particular characteristic."""

    exit_code = 2
    error_code = "UNSUPPORTED_CHARACTERISTIC"

    def __init__(self, p: int, supported: str = "p = 2"):
        self.p = p
        super().__init__(
            detail=f"Operation supports {supported}, got p = {p}",
            user_message=f"Only {supported} is supported here",
        )


class PreconditionError(C2LabError):
    """A hypothesis of the requested method does not hold."""

    exit_code = 2
    error_code = "PRECONDITION_FAILED"
    user_message = "Method precondition violated"


class DegreeMismatchError(PreconditionError):
    """Polynomial degree exceeds its number of variables."""

    error_code = "DEGREE_MISMATCH"

    def __init__(self, degree: int, num_vars: int):
        self.degree = degree
        self.num_vars = num_vars
        super().__init__(
            detail=f"Polynomial degree {degree} does not fit {num_vars} variables",
            user_message="degree/variable mismatch",
        )


class NonDivisibleCountError(C2LabError):
    """A point count is not divisible by p^2."""

    exit_code = 4
    error_code = "NON_DIVISIBLE_COUNT"

    def __init__(self, count: int, p: int):
        self.count = count
        self.p = p
        super().__init__(
            detail=f"Point count {count} is not divisible by {p}^2",
            user_message="Point count failed the p^2 divisibility check",
        )


class DegenerateEdgeChoiceError(PreconditionError):
    """No edge choice gives nonvanishing Dodgson factors."""

    error_code = "DEGENERATE_EDGE_CHOICE"
    user_message = "No nondegenerate edge choice found"


class FactorMismatchError(PreconditionError):
    """Assignment factors are inconsistent with the host graph or p."""

    error_code = "FACTOR_MISMATCH"
    user_message = "Assignment factors do not match the problem"


class CrossCheckError(C2LabError):
    """Independent methods disagreed."""

    exit_code = 4
    error_code = "CROSS_CHECK_FAILED"

    def __init__(self, values: dict[str, int]):
        self.values = values
        rendered = ", ".join(f"{name}={value}" for name, value in values.items())
        super().__init__(
            detail=f"Methods disagree: {rendered}",
            user_message="Cross-check failed",
        )


# -----------------------------------------------------------------------------
# Families
# -----------------------------------------------------------------------------


class FamilyParameterError(C2LabError):
    """Generator parameters are out of bounds."""

    exit_code = 2
    error_code = "FAMILY_PARAMETER"
    user_message = "Invalid family parameters"


class LabelingError(FamilyParameterError):
    """An isomorphism labeling hypothesis fails or the labeling is not an isomorphism."""

    error_code = "LABELING"
    user_message = "Labeling is not an isomorphism"


class NotFourRegularError(FamilyParameterError):
    """Decompletion requires a connected 4-regular graph."""

    error_code = "NOT_FOUR_REGULAR"

    def __init__(self, degrees: dict[int, int]):
        self.degrees = degrees
        bad = ", ".join(f"v{v}:{d}" for v, d in sorted(degrees.items())[:8])
        super().__init__(
            detail=f"Vertices with degree != 4: {bad}",
            user_message="Decompletion needs a connected 4-regular graph",
        )


# -----------------------------------------------------------------------------
# Recurrence engine
# -----------------------------------------------------------------------------


class FamilySpecError(C2LabError):
    """A recursive family specification is malformed or violates the family conditions."""

    exit_code = 2
    error_code = "FAMILY_SPEC"
    user_message = "Invalid family specification"


class TemplateError(FamilySpecError):
    """Edge or deletion template references something outside its window."""

    error_code = "FAMILY_TEMPLATE"
    user_message = "Family template is malformed"


class NeighborhoodError(FamilySpecError):
    """New layer vertices are adjacent to vertices outside the boundary window."""

    error_code = "FAMILY_NEIGHBORHOOD"
    user_message = "Layer vertices reach outside the boundary window"


class InducedBoundaryError(FamilySpecError):
    """The graph induced on the boundary window changes from member to member."""

    error_code = "FAMILY_INDUCED_BOUNDARY"
    user_message = "Induced boundary graph is not constant"


class EdgeCountError(FamilySpecError):
    """Members do not satisfy 2|V| = |E| + 2."""

    error_code = "FAMILY_EDGE_COUNT"

    def __init__(self, n: int, vertices: int, edges: int):
        self.n = n
        super().__init__(
            detail=f"G_{n} has {vertices} vertices and {edges} edges; 2|V| != |E| + 2",
            user_message="2|V| = |E| + 2 violated",
        )


class StateHygieneError(C2LabError):
    """A partition state mentions a vertex outside the boundary window."""

    exit_code = 4
    error_code = "STATE_HYGIENE"
    user_message = "Partition state left the boundary window"


class StateOverflowError(C2LabError):
    """The reachable state space exceeds the configured cap."""

    exit_code = 3
    error_code = "STATE_OVERFLOW"

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(
            detail=f"More than {cap} reachable states",
            user_message="State space exceeds --state-cap",
        )


class OverlapMismatchError(C2LabError):
    """Recurrence-predicted and directly computed c2 values disagree."""

    exit_code = 4
    error_code = "OVERLAP_MISMATCH"

    def __init__(self, index: int, direct: int, predicted: int):
        self.index = index
        super().__init__(
            detail=f"Index {index}: direct c2 = {direct}, recurrence predicts {predicted}",
            user_message="Recurrence disagrees with direct computation",
        )


class ExperimentalFeatureError(C2LabError):
    """An experimental path was requested without enabling it."""

    exit_code = 2
    error_code = "EXPERIMENTAL_DISABLED"
    user_message = "Enable experimental_odd_p to run the recurrence engine for p > 2"
