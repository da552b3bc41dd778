"""
Centralized logging configuration for ATMask.

Call setup_logging() once per CLI invocation.
All modules using logging.getLogger(__name__) will automatically
inherit this configuration. Console output goes to stderr so that
stdout stays clean for reports and stats tables.
"""
import json
import logging
import logging.handlers
import sys
from contextvars import ContextVar
from datetime import datetime, timezone
from pathlib import Path

# ── Context variable for run correlation ──
run_id_var: ContextVar[str] = ContextVar("run_id", default="-")

# Extra record attributes copied into JSON log lines
_EXTRA_KEYS = ("command", "step", "loss", "duration_ms", "path", "seed")


def get_run_id() -> str:
    """Get the current run ID from context. Usable from any module."""
    return run_id_var.get("-")


# ══════════════════════════════════════════════════════════════════
# JSON Formatter (for log files / aggregation)
# ══════════════════════════════════════════════════════════════════
class JSONFormatter(logging.Formatter):
    """Outputs each log record as a single JSON line."""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "run_id": get_run_id(),
        }
        if record.exc_info and record.exc_info[0] is not None:
            entry["exception"] = self.formatException(record.exc_info)
        for key in _EXTRA_KEYS:
            if hasattr(record, key):
                entry[key] = getattr(record, key)
        return json.dumps(entry, ensure_ascii=False)


# ══════════════════════════════════════════════════════════════════
# Console Formatter (colored, human-readable)
# ══════════════════════════════════════════════════════════════════
class ColoredFormatter(logging.Formatter):
    """
    Colored console output.
    Format: [HH:MM:SS] LEVEL    logger - message  [run:id]
    """

    COLORS = {
        "DEBUG":    "\033[36m",    # Cyan
        "INFO":     "\033[32m",    # Green
        "WARNING":  "\033[33m",    # Yellow
        "ERROR":    "\033[31m",    # Red
        "CRITICAL": "\033[1;31m",  # Bold Red
    }
    RESET = "\033[0m"
    DIM = "\033[2m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        time_str = datetime.fromtimestamp(record.created).strftime("%H:%M:%S")

        # Shorten logger name: atmask.services.texture_map → texture_map
        name = record.name
        parts = name.split(".")
        if len(parts) > 2:
            name = parts[-1]

        run_id = get_run_id()
        run_tag = f" {self.DIM}[run:{run_id[:8]}]{self.RESET}" if run_id != "-" else ""

        return (
            f"{self.DIM}[{time_str}]{self.RESET} "
            f"{color}{record.levelname:<8}{self.RESET} "
            f"{name} - {record.getMessage()}{run_tag}"
        )


def _file_handler(path: Path, level: int, log_json: bool, backup_count: int) -> logging.Handler:
    handler = logging.handlers.RotatingFileHandler(
        filename=str(path),
        maxBytes=10 * 1024 * 1024,  # 10 MB
        backupCount=backup_count,
        encoding="utf-8",
    )
    handler.setLevel(level)
    if log_json:
        handler.setFormatter(JSONFormatter())
    else:
        handler.setFormatter(logging.Formatter(
            "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
        ))
    return handler


# ══════════════════════════════════════════════════════════════════
# Setup
# ══════════════════════════════════════════════════════════════════
def setup_logging(
    log_level: str = "INFO",
    log_dir: Path = Path("./logs"),
    log_json: bool = True,
    log_to_file: bool = False,
) -> None:
    """
    Configure the root logger with a console handler and optional file handlers.

    Args:
        log_level: Minimum log level (DEBUG, INFO, WARNING, ERROR).
        log_dir: Directory for log files.
        log_json: Whether to write JSON to log files.
        log_to_file: Whether to attach the rotating file handlers at all.
    """
    level = getattr(logging, log_level.upper(), logging.INFO)

    root = logging.getLogger()
    root.setLevel(level)

    # Clear any existing handlers (e.g. from basicConfig or a previous run)
    root.handlers.clear()

    # ── Console handler ──
    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(ColoredFormatter())
    root.addHandler(console)

    if log_to_file:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        root.addHandler(_file_handler(log_dir / "atmask.log", level, log_json, backup_count=5))
        # ── Error-only file (for quick triage) ──
        root.addHandler(_file_handler(log_dir / "atmask.error.log", logging.ERROR, log_json, backup_count=3))

    # ── Quiet noisy third-party loggers ──
    for noisy in ("PIL", "matplotlib", "nibabel", "numexpr"):
        logging.getLogger(noisy).setLevel(logging.WARNING)

    logging.getLogger("atmask").debug(
        f"Logging configured: level={log_level}, dir={log_dir}, json={log_json}, file={log_to_file}"
    )
