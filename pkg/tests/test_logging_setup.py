"""
Tests for structured logging configuration.
"""

import io

import structlog

from c2lab.cli import main
from c2lab.config import Settings
from c2lab.logging_setup import ensure_logging, setup_structured_logging


class TestLogging:
    """Test where log events go and which are kept."""

    def test_level_filter_applies_to_library_loggers(self, capsys):
        """Test events below the configured level are dropped."""
        log = structlog.get_logger("c2lab.engine")
        log.info("point_count_started")
        log.warning("budget_nearly_spent")

        err = capsys.readouterr().err
        assert "point_count_started" not in err
        assert "budget_nearly_spent" in err

    def test_json_lines(self, capsys):
        """Test --json style settings render one JSON object per event."""
        setup_structured_logging(Settings(json_logs=True))
        structlog.get_logger("c2lab").warning("state_cap_close", states=10)

        err = capsys.readouterr().err
        assert '"event": "state_cap_close"' in err
        assert '"states": 10' in err

    def test_ensure_logging_configures_once(self):
        """Test defaults are applied only when nothing is configured."""
        structlog.reset_defaults()
        ensure_logging()
        assert structlog.is_configured()

        setup_structured_logging(Settings(json_logs=True))
        configured = structlog.get_config()["processors"]
        ensure_logging()
        assert structlog.get_config()["processors"] == configured

    def test_cli_reentrant_after_stderr_replaced(self, monkeypatch, capsys):
        """Test a second run logs to the current stderr, not a closed one."""
        first = io.StringIO()
        monkeypatch.setattr("sys.stderr", first)
        assert main(["gen", "x-ladder", "round", "8"]) == 2
        assert "command_failed" in first.getvalue()
        first.close()

        second = io.StringIO()
        monkeypatch.setattr("sys.stderr", second)
        assert main(["gen", "x-ladder", "round", "8"]) == 2
        assert "command_failed" in second.getvalue()
