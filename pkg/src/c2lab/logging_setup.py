"""
Structured logging configuration.
"""

import logging
import sys
from typing import Any

import structlog

from c2lab.config import Settings, get_settings


def _stderr_logger(*args: Any) -> structlog.PrintLogger:
    # resolved per call so a replaced or closed sys.stderr is never kept
    return structlog.PrintLogger(file=sys.stderr)


def setup_structured_logging(settings: Settings) -> None:
    """Configure structured logging with structlog."""
    processors: list[structlog.types.Processor] = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
    ]

    if settings.is_production or settings.json_logs:
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.dev.ConsoleRenderer())

    # stdout carries reports, so logs go to stderr
    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(
            logging.getLevelName(settings.log_level)
        ),
        context_class=dict,
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )


def ensure_logging() -> None:
    """Apply the environment's settings unless logging was configured already."""
    if not structlog.is_configured():
        setup_structured_logging(get_settings())
