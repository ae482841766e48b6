"""
Tests for the command-line interface.
"""

import json

import pytest

from c2lab.cli import build_parser, main
from c2lab.graph.core import LabeledGraph


def _run_json(capsys, argv):
    code = main(["--format", "json", *argv])
    return code, json.loads(capsys.readouterr().out)


class TestGen:
    """Test graph generation."""

    def test_decompleted_grid(self, capsys):
        """Test the decompleted 3x3 grid is written with its census name."""
        assert main(["gen", "toroidal", "3", "0", "3", "--decomplete"]) == 0

        out = capsys.readouterr().out
        assert out.startswith("# toroidal(3,0,3)~0 = P_{7,10}\n")
        g = LabeledGraph.from_text(out)
        assert (g.vertex_count, g.edge_count) == (8, 14)

    def test_output_file(self, tmp_path, capsys):
        """Test --output writes the graph to a file."""
        target = tmp_path / "ladder.txt"

        assert main(["--output", str(target), "gen", "x-ladder", "capped", "8"]) == 0
        assert capsys.readouterr().out == ""
        assert LabeledGraph.from_text(target.read_text()).vertex_count == 8

    def test_exceptional_x_ladder(self, capsys):
        """Test --exceptional removes the middle-rung vertex of a capped ladder."""
        assert main(["gen", "x-ladder", "capped", "8", "--exceptional"]) == 0

        out = capsys.readouterr().out
        assert out.startswith("# capped_x_ladder(8)~2 = P_{6,3}\n")
        assert LabeledGraph.from_text(out).vertex_count == 7

    def test_exceptional_needs_capped_ladder(self, capsys):
        """Test --exceptional is refused for symmetric ladders and other families."""
        assert main(["gen", "x-ladder", "symmetric", "8", "--exceptional"]) == 2
        assert main(["gen", "circulant", "9", "1", "3", "--exceptional"]) == 2

    def test_bad_x_ladder_kind(self, capsys):
        """Test an unknown ladder kind fails with a parameter error."""
        assert main(["gen", "x-ladder", "round", "8"]) == 2


class TestC2:
    """Test the c2 subcommand."""

    def test_brute_json(self, capsys, write_graph, k4):
        """Test a JSON report for brute force at p = 3."""
        code, report = _run_json(capsys, ["c2", str(write_graph(k4)), "--p", "3", "--method", "brute"])

        assert code == 0
        assert report["ok"] is True
        assert report["result"]["kind"] == "c2"
        assert report["result"]["value"] == 2
        assert report["inputs"]["graph_hash"] == k4.text_hash()

    def test_cross_check(self, capsys, write_graph, k4):
        """Test --cross-check records every method."""
        code, report = _run_json(capsys, ["c2", str(write_graph(k4)), "--cross-check"])

        assert code == 0
        assert set(report["cross_check"]) == {"brute", "formula1", "formula2", "formula3", "assign"}
        assert set(report["cross_check"].values()) == {1}

    def test_stdin(self, capsys, monkeypatch, triangle):
        """Test reading the graph from stdin."""
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(triangle.to_text()))
        code, report = _run_json(capsys, ["c2", "-", "--method", "brute"])

        assert code == 0
        assert report["result"]["value"] == 1

    def test_bad_graph(self, capsys, tmp_path):
        """Test a malformed graph file is reported with its error code."""
        path = tmp_path / "bad.txt"
        path.write_text("v 3\ne 0 0\n")
        code, report = _run_json(capsys, ["c2", str(path)])

        assert code == 2
        assert report["ok"] is False
        assert report["error"]["error_code"] == "SELF_LOOP"

    def test_budget_flag(self, capsys, write_graph, grid_333):
        """Test --budget limits brute-force counting."""
        code, report = _run_json(
            capsys, ["--budget", "100", "c2", str(write_graph(grid_333)), "--p", "3", "--method", "brute"]
        )

        assert code == 3
        assert report["error"]["error_code"] == "BUDGET_EXCEEDED"

    def test_table_output(self, capsys, write_graph, k4):
        """Test the default table output mentions the value."""
        assert main(["c2", str(write_graph(k4))]) == 0

        assert "assign" in capsys.readouterr().out


class TestScan:
    """Test the scan subcommand."""

    def test_zigzag_circulants(self, capsys):
        """Test C_n(1, 2) minus a vertex has c2 = 1 mod 2."""
        code, report = _run_json(capsys, ["scan", "circulant", "--range", "7:9", "--gaps", "1", "2"])

        assert code == 0
        rows = report["result"]["rows"]
        assert [row["result"]["value"] for row in rows] == [1, 1, 1]

    def test_failed_row_sets_exit_code(self, capsys):
        """Test a member that is not 4-regular fails only its own row."""
        code, report = _run_json(capsys, ["scan", "circulant", "--range", "5:6"])

        rows = report["result"]["rows"]
        assert code == 2
        assert rows[0]["result"]["value"] == 1
        assert rows[1]["error"]["error_code"] == "NOT_FOUR_REGULAR"

    def test_x_ladders_skip_odd_sizes(self, capsys):
        """Test X-ladder scans only visit even sizes."""
        code, report = _run_json(capsys, ["scan", "capped-x-ladder", "--range", "8:9"])

        assert code == 0
        assert [row["label"] for row in report["result"]["rows"]] == ["capped_x_ladder(8)~0"]
        assert report["result"]["rows"][0]["census_name"] == "P_{6,3}"

    def test_bad_range(self, capsys):
        """Test an empty range is a usage error."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["scan", "nonskew", "--range", "5:3"])


class TestRecur:
    """Test the recur subcommand."""

    def test_builtin_zigzag(self, capsys):
        """Test solving a built-in family."""
        code, report = _run_json(capsys, ["recur", "zigzag"])

        assert code == 0
        assert report["result"]["kind"] == "recurrence"
        assert report["result"]["period"] == [1]

    def test_odd_p_needs_flag(self, capsys):
        """Test odd characteristic is refused without the experimental flag."""
        code, report = _run_json(capsys, ["recur", "zigzag", "--p", "3"])

        assert code == 2
        assert report["error"]["error_code"] == "EXPERIMENTAL_DISABLED"

    def test_spec_file_error(self, capsys, family_data):
        """Test a spec file failing validation."""
        code, report = _run_json(capsys, ["recur", str(family_data / "path.toml")])

        assert code == 2
        assert report["error"]["error_code"] == "FAMILY_EDGE_COUNT"


class TestSchema:
    """Test the schema subcommand."""

    def test_schema(self, capsys):
        """Test the printed schema is JSON with an id."""
        assert main(["schema"]) == 0

        schema = json.loads(capsys.readouterr().out)
        assert schema["$id"].endswith("run_report.v1.json")

    def test_version(self, capsys):
        """Test --version exits after printing."""
        with pytest.raises(SystemExit):
            main(["--version"])
        assert "c2lab" in capsys.readouterr().out
