"""
Run telemetry for mrvae experiments.

Each run gets its own non-propagating logger that writes one JSON object per
line: per-epoch metric rows from training and outcome rows from experiments.
"""
import json
import logging
import os
import platform
import threading
import uuid
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


class RunLogConfig:
    """Configuration constants for run telemetry"""

    ENCODING = "utf-8"
    RUNS_SUBDIR = "runs"


class RunManager:
    """Manages run state and telemetry logging"""

    def __init__(self):
        self._current_run_id: Optional[str] = None
        self._run_loggers: Dict[str, logging.Logger] = {}
        self._lock = threading.Lock()
        self._host_details: Optional[Dict[str, Any]] = None

    @property
    def current_run_id(self) -> Optional[str]:
        return self._current_run_id

    def get_host_details(self) -> Dict[str, Any]:
        """Get cached host details"""
        if self._host_details is None:
            self._host_details = {
                "node": platform.node(),
                "os": platform.system(),
                "python": platform.python_version(),
            }
        return self._host_details

    def start_run(self, run_id: Optional[str] = None, out_dir: Optional[str] = None) -> str:
        """Start a new run, ending the previous one if still open"""
        with self._lock:
            if run_id is None:
                run_id = uuid.uuid4().hex[:16]

            if self._current_run_id:
                self._end_run_internal(self._current_run_id)

            self._current_run_id = run_id

            try:
                self._create_run_logger(run_id, out_dir)
                logger.info(f"Run started: {run_id}")
            except Exception as e:
                logger.error(f"Failed to start run {run_id}: {e}")
                raise

            return run_id

    def _create_run_logger(self, run_id: str, out_dir: Optional[str]) -> None:
        run_logger = logging.getLogger(f"run.{run_id}")
        run_logger.handlers.clear()
        run_logger.setLevel(logging.INFO)
        run_logger.propagate = False

        base = Path(out_dir) if out_dir else self._get_project_root() / "logs"
        runs_dir = base / RunLogConfig.RUNS_SUBDIR
        runs_dir.mkdir(parents=True, exist_ok=True)

        handler = logging.FileHandler(runs_dir / f"{run_id}.jsonl", encoding=RunLogConfig.ENCODING)
        handler.setFormatter(RunJsonFormatter(run_id, self))
        run_logger.addHandler(handler)

        self._run_loggers[run_id] = run_logger

    def end_run(self, run_id: Optional[str] = None) -> None:
        with self._lock:
            target = run_id or self._current_run_id
            if target:
                self._end_run_internal(target)

    def _end_run_internal(self, run_id: str) -> None:
        if run_id in self._run_loggers:
            run_logger = self._run_loggers[run_id]
            for handler in run_logger.handlers[:]:
                handler.close()
                run_logger.removeHandler(handler)
            del self._run_loggers[run_id]
            logger.info(f"Run ended: {run_id}")

        if run_id == self._current_run_id:
            self._current_run_id = None

    def get_run_logger(self, run_id: Optional[str] = None) -> Optional[logging.Logger]:
        """Get run-specific logger (None when no run is open)"""
        target = run_id or self._current_run_id
        if target and target in self._run_loggers:
            return self._run_loggers[target]
        return None

    def log_metrics(self, row: Dict[str, Any], run_id: Optional[str] = None) -> None:
        """Write a metric row to the run log; silently dropped when no run is open"""
        run_logger = self.get_run_logger(run_id)
        if not run_logger:
            logger.debug(f"No active run for metric row: {sorted(row)}")
            return
        run_logger.info(json.dumps(row, default=float))

    @staticmethod
    def _get_project_root() -> Path:
        # This file is at src/mrvae/core/session.py
        return Path(os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "..")))


class RunJsonFormatter(logging.Formatter):
    """JSON-lines formatter for run telemetry"""

    def __init__(self, run_id: str, run_manager: RunManager):
        super().__init__()
        self.run_id = run_id
        self.run_manager = run_manager

    def format(self, record) -> str:
        try:
            message = record.getMessage()
            try:
                payload = json.loads(message)
            except json.JSONDecodeError:
                payload = message

            entry = {
                "run_id": self.run_id,
                "timestamp": self.formatTime(record, "%Y-%m-%d %H:%M:%S"),
                "record": payload,
                "host": self.run_manager.get_host_details(),
            }
            return json.dumps(entry)
        except Exception as e:
            return f"JSON_FORMAT_ERROR: {record.getMessage()} | Error: {e}"


_run_manager = RunManager()


def start_run(run_id: Optional[str] = None, out_dir: Optional[str] = None) -> str:
    """Start a new run"""
    return _run_manager.start_run(run_id, out_dir)


def end_run(run_id: Optional[str] = None) -> None:
    """End the current run"""
    _run_manager.end_run(run_id)


def get_run_logger(run_id: Optional[str] = None) -> Optional[logging.Logger]:
    return _run_manager.get_run_logger(run_id)


def log_metrics(row: Dict[str, Any], run_id: Optional[str] = None) -> None:
    """Log a metric row to the current run"""
    _run_manager.log_metrics(row, run_id)


def get_current_run_id() -> Optional[str]:
    return _run_manager.current_run_id
