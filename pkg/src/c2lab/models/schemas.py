"""
Pydantic models for c2lab results and run reports.

Everything the CLI writes is one of these models serialised as JSON.
"""

from datetime import datetime
from typing import Annotated, Any, Literal

from pydantic import BaseModel, Field, model_validator

REPORT_FORMAT_VERSION = 1
SCHEMA_ID = "https://c2lab.invalid/schemas/run_report.v1.json"

ParameterValue = int | bool | str | list[int] | None


class C2Result(BaseModel):
    """A c2 value at one prime, with the method that produced it."""

    kind: Literal["c2"] = "c2"
    p: int = Field(..., ge=2, description="The prime")
    method: Literal["brute", "coeff", "assign"] = Field(
        ...,
        description="brute: point count of the Kirchhoff polynomial; coeff: c2 formula via point "
        "counting; assign: edge-assignment counting",
    )
    value: int = Field(..., ge=0, description="c2 residue in [0, p)")
    formula: Literal[1, 2, 3] | None = Field(
        default=None,
        description="Which c2 formula was used, if any",
    )
    edge_choice: list[int] | None = Field(
        default=None,
        description="Edge ids (i, j, k[, l[, m]]) fed to the formula",
    )
    strategy: str | None = Field(
        default=None,
        description="Counting strategy for the assign method (frontier or enumerate)",
    )
    diagnostics: dict[str, int] = Field(
        default_factory=dict,
        description="Raw point counts or assignment counts",
    )

    @model_validator(mode="after")
    def _value_is_residue(self) -> "C2Result":
        if self.value >= self.p:
            raise ValueError(f"value {self.value} is not a residue mod {self.p}")
        count = self.diagnostics.get("point_count")
        if self.method == "brute" and count is not None and count % (self.p * self.p):
            raise ValueError(f"point count {count} not divisible by p^2")
        return self


class VerifiedValue(BaseModel):
    """A member where direct computation and the recurrence were compared."""

    n: int = Field(..., ge=0, description="Member index in the family")
    index: int = Field(..., description="Reported index (first_index + stride * n)")
    direct: int = Field(..., ge=0)
    predicted: int | None = Field(
        default=None,
        description="Recurrence prediction; None below the recurrence base level",
    )


class RecurrenceSolution(BaseModel):
    """
    Eventually periodic c2 sequence of a recursive family.

    ``value_at(n)`` covers every member ``n >= offset``.
    """

    kind: Literal["recurrence"] = "recurrence"
    family: str = Field(..., description="Family name from the spec file")
    p: int = Field(..., ge=2)
    offset: int = Field(..., ge=0, description="Smallest member index covered")
    preperiod: list[int] = Field(default_factory=list)
    period: list[int] = Field(..., min_length=1)
    first_index: int = Field(default=0, description="Reported index of member 0")
    stride: int = Field(default=1, ge=1, description="Reported index step per member")
    base_level: int = Field(default=0, ge=0, description="First member predicted by the recurrence")
    state_count: int = Field(default=0, ge=0, description="Reachable partition states")
    formula_edges: list[int] = Field(default_factory=list)
    verified: list[VerifiedValue] = Field(default_factory=list)

    @model_validator(mode="after")
    def _residues(self) -> "RecurrenceSolution":
        for v in (*self.preperiod, *self.period):
            if not 0 <= v < self.p:
                raise ValueError(f"{v} is not a residue mod {self.p}")
        return self

    def value_at(self, n: int) -> int:
        """c2 of member ``n``."""
        if n < self.offset:
            raise ValueError(f"member {n} is below the covered offset {self.offset}")
        k = n - self.offset
        if k < len(self.preperiod):
            return self.preperiod[k]
        return self.period[(k - len(self.preperiod)) % len(self.period)]

    def index_of(self, n: int) -> int:
        return self.first_index + self.stride * n

    def value_at_index(self, index: int) -> int:
        """c2 by reported index (for example the circulant size)."""
        n, rem = divmod(index - self.first_index, self.stride)
        if rem:
            raise ValueError(f"index {index} is not a member of the family")
        return self.value_at(n)


class RowReport(BaseModel):
    """One row of a scan: a single generated graph and its c2 value or error."""

    label: str
    parameters: dict[str, ParameterValue] = Field(default_factory=dict)
    graph_hash: str | None = None
    vertices: int = Field(..., ge=0)
    edges: int = Field(..., ge=0)
    census_name: str | None = Field(default=None, description="Known census name, if any")
    result: C2Result | None = None
    error: dict[str, str] | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class ScanReport(BaseModel):
    """Results for a family over a parameter range."""

    kind: Literal["scan"] = "scan"
    family: str
    p: int = Field(..., ge=2)
    method: str
    rows: list[RowReport] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)


class GraphSummary(BaseModel):
    """A generated graph file."""

    kind: Literal["graph"] = "graph"
    vertices: int = Field(..., ge=0)
    edges: int = Field(..., ge=0)
    path: str | None = None


ResultUnion = Annotated[
    C2Result | RecurrenceSolution | ScanReport | GraphSummary,
    Field(discriminator="kind"),
]


class RunInputs(BaseModel):
    graph_hash: str | None = Field(default=None, description="sha256 of the canonical graph text")
    parameters: dict[str, ParameterValue] = Field(default_factory=dict)
    p: int | None = None


class RunReport(BaseModel):
    """Self-describing record of one CLI invocation."""

    format_version: Literal[1] = REPORT_FORMAT_VERSION
    command: list[str] = Field(..., description="Echo of the command line")
    inputs: RunInputs = Field(default_factory=RunInputs)
    result: ResultUnion | None = None
    cross_check: dict[str, int] = Field(
        default_factory=dict,
        description="Values of every method run by --cross-check",
    )
    methods: list[str] = Field(default_factory=list, description="Method provenance")
    started_at: datetime
    elapsed_seconds: float = Field(..., ge=0.0)
    ok: bool = True
    error: dict[str, str] | None = None

    @classmethod
    def json_schema(cls) -> dict[str, Any]:
        schema = cls.model_json_schema()
        schema["$id"] = SCHEMA_ID
        return schema
