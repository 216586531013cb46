"""
diffset toolkit - Structured Logging
Console logging goes to stderr; stdout carries the JSON-lines report stream.

Records carry sweep context (suite, q, seed, ...) as extra fields. The
console format appends it as ``[suite=covm q=11 seed=42]``; the JSON format
puts the known context keys first so log lines can be joined with report rows.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Optional

# Keys in the order they are rendered; other extra fields follow alphabetically
CONTEXT_FIELDS = ("suite", "index", "q", "seed", "quantity", "objective", "component")


def _ordered_context(fields: dict[str, Any]) -> dict[str, Any]:
    ordered = {key: fields[key] for key in CONTEXT_FIELDS if key in fields}
    ordered.update({key: fields[key] for key in sorted(fields) if key not in ordered})
    return ordered


def _context_of(record: logging.LogRecord) -> dict[str, Any]:
    return _ordered_context(getattr(record, "extra_fields", {}))


class JSONFormatter(logging.Formatter):
    """One JSON object per record: time, level, logger, message, then context"""

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            "ts": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        log_data.update(_context_of(record))
        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_data, default=str)


class ContextFormatter(logging.Formatter):
    """Plain-text lines with the sweep context appended in brackets"""

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        context = _context_of(record)
        if not context:
            return line
        rendered = " ".join(f"{key}={value}" for key, value in context.items())
        head, sep, tail = line.partition("\n")
        return f"{head} [{rendered}]{sep}{tail}"


class StructuredLogger(logging.LoggerAdapter):
    """Logger adapter whose bound context is merged into every record"""

    def process(self, msg: str, kwargs: dict[str, Any]) -> tuple[str, dict[str, Any]]:
        fields = dict(self.extra or {})
        fields.update(kwargs.get("extra", {}))
        kwargs["extra"] = {"extra_fields": fields}
        return msg, kwargs

    def bind(self, **context: Any) -> "StructuredLogger":
        """New adapter with context added, e.g. bind(suite="covm", q=11, seed=42)"""
        return StructuredLogger(self.logger, {**(self.extra or {}), **context})


def setup_logging(
    log_level: str = "WARNING",
    log_file: Optional[Path] = None,
    enable_json: bool = False,
    max_bytes: int = 10 * 1024 * 1024,
    backup_count: int = 5,
) -> None:
    """
    Configure the root logger: stderr console plus an optional rotating file.

    Args:
        log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_file: Optional path to log file
        enable_json: JSON records instead of text lines
        max_bytes: Max size of log file before rotation
        backup_count: Number of rotated files to keep
    """
    level = getattr(logging, log_level.upper())
    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    root_logger.handlers.clear()

    def formatter(text_format: str) -> logging.Formatter:
        return JSONFormatter() if enable_json else ContextFormatter(text_format)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root_logger.addHandler(console_handler)

    if log_file:
        log_file = Path(log_file)
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(log_file, maxBytes=max_bytes, backupCount=backup_count)
        file_handler.setLevel(level)
        file_handler.setFormatter(
            formatter("%(asctime)s %(levelname)s %(name)s:%(lineno)d: %(message)s")
        )
        root_logger.addHandler(file_handler)


def get_logger(name: str, **context: Any) -> StructuredLogger:
    """
    Get a structured logger with optional bound context.

    Example:
        logger = get_logger(__name__, component="covering")
        logger.bind(suite="covm", q=13).info("Cover found", extra={"k": 3})
    """
    return StructuredLogger(logging.getLogger(name), context)
