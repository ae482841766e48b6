"""
Pydantic models for c2lab.
"""

from c2lab.models.schemas import (
    REPORT_FORMAT_VERSION,
    C2Result,
    GraphSummary,
    RecurrenceSolution,
    RowReport,
    RunInputs,
    RunReport,
    ScanReport,
    VerifiedValue,
)

__all__ = [
    "REPORT_FORMAT_VERSION",
    "C2Result",
    "GraphSummary",
    "RecurrenceSolution",
    "RowReport",
    "RunInputs",
    "RunReport",
    "ScanReport",
    "VerifiedValue",
]
