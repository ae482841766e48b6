"""
Tests for the result and report models.
"""

import json
from datetime import UTC, datetime

import pytest
from pydantic import ValidationError

from c2lab.models import C2Result, RecurrenceSolution, RunReport, ScanReport
from c2lab.models.schemas import SCHEMA_ID, RowReport


def _report(result) -> RunReport:
    return RunReport(
        command=["c2lab", "c2", "k4.txt"],
        result=result,
        started_at=datetime(2026, 1, 1, tzinfo=UTC),
        elapsed_seconds=0.5,
    )


class TestC2Result:
    """Test the c2 result model."""

    def test_residue_range(self):
        """Test values must be residues mod p."""
        with pytest.raises(ValidationError):
            C2Result(p=3, method="brute", value=3)

    def test_brute_count_divisible(self):
        """Test brute-force point counts must be divisible by p^2."""
        with pytest.raises(ValidationError):
            C2Result(p=2, method="brute", value=1, diagnostics={"point_count": 6})

    def test_unknown_method(self):
        """Test the method name is checked."""
        with pytest.raises(ValidationError):
            C2Result(p=2, method="guess", value=0)


class TestRecurrenceSolution:
    """Test eventually periodic sequences."""

    @pytest.fixture
    def solution(self):
        return RecurrenceSolution(
            family="toy",
            p=2,
            offset=2,
            preperiod=[0],
            period=[1, 0],
            first_index=3,
            stride=3,
        )

    def test_value_at(self, solution):
        """Test preperiod then period."""
        assert [solution.value_at(n) for n in range(2, 8)] == [0, 1, 0, 1, 0, 1]

    def test_below_offset(self, solution):
        """Test members below the offset are not covered."""
        with pytest.raises(ValueError):
            solution.value_at(1)

    def test_value_at_index(self, solution):
        """Test lookup by reported index."""
        assert solution.index_of(3) == 12
        assert solution.value_at_index(12) == 1
        with pytest.raises(ValueError):
            solution.value_at_index(13)

    def test_empty_period(self):
        """Test a period is required."""
        with pytest.raises(ValidationError):
            RecurrenceSolution(family="toy", p=2, offset=0, period=[])

    def test_non_residue(self):
        """Test entries must be residues."""
        with pytest.raises(ValidationError):
            RecurrenceSolution(family="toy", p=2, offset=0, period=[2])


class TestRunReport:
    """Test run reports and their schema."""

    def test_round_trip_keeps_result_kind(self):
        """Test the result union is resolved by its kind."""
        report = _report(C2Result(p=3, method="brute", value=2, diagnostics={"point_count": 18}))
        loaded = RunReport.model_validate_json(report.model_dump_json())

        assert isinstance(loaded.result, C2Result)
        assert loaded.result.value == 2

    def test_scan_result(self):
        """Test a scan report with a failed row."""
        scan = ScanReport(
            family="circulant",
            p=2,
            method="assign",
            rows=[RowReport(label="x", vertices=0, edges=0, error={"error_code": "E"})],
        )
        loaded = RunReport.model_validate_json(_report(scan).model_dump_json())

        assert isinstance(loaded.result, ScanReport)
        assert not loaded.result.ok

    def test_schema(self):
        """Test the schema carries its id and the result discriminator."""
        schema = RunReport.json_schema()
        text = json.dumps(schema)

        assert schema["$id"] == SCHEMA_ID
        assert "discriminator" in text
        version = schema["properties"]["format_version"]
        assert version.get("const") == 1 or version.get("enum") == [1]
