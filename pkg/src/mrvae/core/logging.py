"""
Global logging for mrvae.

Records are written to a daily-rotated file and to stderr. Every record carries
the experiment name and run id of the run in progress (``-`` outside a run), so
one log file can hold many CLI invocations. NumPy floating-point warnings are
routed through the ``py.warnings`` logger instead of being printed raw.
"""

import logging
import os
import sys
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Optional


class LoggingConfig:
    """Configuration constants for logging."""

    DEFAULT_LOG_LEVEL = "INFO"
    WHEN = "midnight"
    DAY_INTERVAL = 1
    BACKUP_COUNT = 7
    ENCODING = "utf-8"
    FILE_FORMAT = "%(asctime)s - %(levelname)s - [%(experiment)s:%(run_id)s] %(name)s - %(message)s"
    CONSOLE_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
    ALIASES = {"QUIET": "CRITICAL"}

    NOISY_LOGGERS = [
        "scipy",
        "pydantic",
    ]


class RunContextFilter(logging.Filter):
    """Stamps ``experiment`` and ``run_id`` onto every record passing a handler."""

    def __init__(self):
        super().__init__()
        self.experiment = "-"
        self.run_id = "-"

    def filter(self, record: logging.LogRecord) -> bool:
        record.experiment = self.experiment
        record.run_id = self.run_id
        return True


class GlobalLogger:
    """Owns the root handlers and the shared run context."""

    def __init__(self):
        self._logger = logging.getLogger("mrvae")
        self._context = RunContextFilter()
        self._configured = False

    @property
    def context(self) -> RunContextFilter:
        return self._context

    def setup(
        self,
        log_level: str = LoggingConfig.DEFAULT_LOG_LEVEL,
        log_file: Optional[str] = None,
        disable_logging: bool = False,
        force: bool = False,
    ) -> None:
        level_name = LoggingConfig.ALIASES.get(log_level.upper(), log_level.upper())
        if disable_logging or level_name == "OFF":
            logging.disable(logging.CRITICAL)
            self._configured = True
            return
        if self._configured and not force:
            return

        logging.disable(logging.NOTSET)
        root = logging.getLogger()
        for handler in list(root.handlers):
            root.removeHandler(handler)
            handler.close()
        root.setLevel(getattr(logging, level_name, logging.INFO))

        file_handler = self._file_handler(log_file)
        if file_handler is not None:
            self._attach(root, file_handler, LoggingConfig.FILE_FORMAT)
        self._attach(root, logging.StreamHandler(sys.stderr), LoggingConfig.CONSOLE_FORMAT)

        logging.captureWarnings(True)
        for name in LoggingConfig.NOISY_LOGGERS:
            logging.getLogger(name).setLevel(logging.WARNING)
        self._configured = True

    def _file_handler(self, log_file: Optional[str]) -> Optional[logging.Handler]:
        path = Path(log_file) if log_file else self._project_root() / "logs" / "mrvae.log"
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            return TimedRotatingFileHandler(
                path,
                when=LoggingConfig.WHEN,
                interval=LoggingConfig.DAY_INTERVAL,
                backupCount=LoggingConfig.BACKUP_COUNT,
                encoding=LoggingConfig.ENCODING,
            )
        except OSError as e:
            print(f"Warning: Failed to create global log file {path}: {e}", file=sys.stderr)
            return None

    def _attach(self, root: logging.Logger, handler: logging.Handler, fmt: str) -> None:
        handler.addFilter(self._context)
        handler.setFormatter(logging.Formatter(fmt))
        root.addHandler(handler)

    def get_logger(self, name: Optional[str] = None) -> logging.Logger:
        if not self._configured:
            self.setup()
        return logging.getLogger(name) if name else self._logger

    @staticmethod
    def _project_root() -> Path:
        if getattr(sys, "frozen", False):
            return Path(os.path.dirname(sys.executable))
        # src/mrvae/core/logging.py
        return Path(__file__).resolve().parents[3]


_global_logger = GlobalLogger()


def setup_logging(
    log_level: str = LoggingConfig.DEFAULT_LOG_LEVEL,
    log_file: Optional[str] = None,
    disable_logging: bool = False,
    force: bool = False,
) -> None:
    """Configure root handlers; ``force`` replaces handlers from an earlier call."""
    _global_logger.setup(log_level, log_file, disable_logging, force)


def set_run_context(experiment: Optional[str] = None, run_id: Optional[str] = None) -> None:
    """Tag subsequent records with ``experiment``/``run_id``; ``None`` clears a field."""
    _global_logger.context.experiment = experiment or "-"
    _global_logger.context.run_id = run_id or "-"


def get_logger(name: Optional[str] = None) -> logging.Logger:
    return _global_logger.get_logger(name)
