"""
Session logging for tubenorm runs.

Each CLI invocation gets a session directory:

    <out>/logs/
    └── YYYYMMDD_HHMMSS/
        ├── events.jsonl    # Structured event log, one JSON object per line
        └── console.log     # Python logging output of the tubenorm logger

Artifacts never carry timestamps; they live here instead.
"""

import json
import logging
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

EVENT_TYPES = (
    "session_started",
    "solve_finished",
    "artifact_written",
    "command_failed",
    "session_ended",
)


@dataclass
class LogEntry:
    timestamp: float
    event_type: str
    session_id: str
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class RunLogManager:
    """
    Records run events and mirrors the ``tubenorm`` logger to a session file.

    In non-blocking mode nothing is written to disk; events are still kept in
    memory so callers and tests can inspect them.
    """

    def __init__(
        self,
        log_dir: Union[str, Path] = "logs",
        session_id: Optional[str] = None,
        non_blocking: bool = False,
    ):
        """
        Initialize the logging system.

        Args:
            log_dir: Directory holding session directories
            session_id: Unique identifier for this session (default: timestamp)
            non_blocking: If True, disable file logging
        """
        self.base_log_dir = Path(log_dir)
        self.session_id = session_id or self._generate_session_id()
        self.non_blocking = non_blocking
        self.session_dir = self.base_log_dir / self.session_id

        if not self.non_blocking:
            try:
                self.session_dir.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                print(f"⚠️  Failed to create session directory, disabling file logging: {e}")
                self.non_blocking = True

        self.events_log_file = self.session_dir / "events.jsonl"
        self.console_log_file = self.session_dir / "console.log"
        self.log_entries: List[LogEntry] = []
        self._handlers: List[logging.Handler] = []
        self._lock = threading.Lock()

        self._setup_logging()
        self.log_event(
            "session_started",
            data={
                "session_id": self.session_id,
                "session_dir": str(self.session_dir),
                "non_blocking_mode": self.non_blocking,
            },
        )

    def _generate_session_id(self) -> str:
        return datetime.now().strftime("%Y%m%d_%H%M%S")

    def _setup_logging(self):
        """Attach a DEBUG file handler and an INFO stream handler to the tubenorm logger."""
        if self.non_blocking:
            return

        log_formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

        console_log_handler = logging.FileHandler(self.console_log_file, encoding="utf-8")
        console_log_handler.setFormatter(log_formatter)
        console_log_handler.setLevel(logging.DEBUG)

        package_logger = logging.getLogger("tubenorm")
        package_logger.addHandler(console_log_handler)
        package_logger.setLevel(logging.DEBUG)
        # Prevent duplicate console logs through the root logger
        package_logger.propagate = False
        self._handlers.append(console_log_handler)

        if not any(
            type(handler) is logging.StreamHandler for handler in package_logger.handlers
        ):
            console_handler = logging.StreamHandler()
            console_handler.setFormatter(log_formatter)
            console_handler.setLevel(logging.INFO)
            package_logger.addHandler(console_handler)
            self._handlers.append(console_handler)

    def log_event(self, event_type: str, data: Optional[Dict[str, Any]] = None):
        """Record one event and append it to events.jsonl."""
        if event_type not in EVENT_TYPES:
            raise ValueError(f"Unknown event type: {event_type}")
        with self._lock:
            entry = LogEntry(time.time(), event_type, self.session_id, data or {})
            self.log_entries.append(entry)
            self._write_log_entry(entry)

    def _write_log_entry(self, entry: LogEntry):
        if self.non_blocking:
            return
        try:
            with open(self.events_log_file, "a", encoding="utf-8", buffering=1) as f:
                f.write(json.dumps(entry.to_dict(), default=str, ensure_ascii=False) + "\n")
        except OSError as e:
            print(f"⚠️  Failed to write log entry: {e}")

    def log_solve(self, eps: float, value: float, wall_time: float, **details):
        self.log_event("solve_finished", data={"eps": eps, "value": value, "wall_time": wall_time, **details})

    def log_artifact(self, path: Union[str, Path]):
        self.log_event("artifact_written", data={"path": str(path)})

    def log_failure(self, error: BaseException):
        self.log_event("command_failed", data={"error": type(error).__name__, "message": str(error)})

    def get_session_summary(self) -> Dict[str, Any]:
        with self._lock:
            event_counts: Dict[str, int] = {}
            for entry in self.log_entries:
                event_counts[entry.event_type] = event_counts.get(entry.event_type, 0) + 1
            duration = (
                self.log_entries[-1].timestamp - self.log_entries[0].timestamp
                if self.log_entries
                else 0.0
            )
            return {
                "session_id": self.session_id,
                "total_events": len(self.log_entries),
                "event_counts": event_counts,
                "session_duration": duration,
                "log_files": {
                    "session_dir": str(self.session_dir),
                    "events_log": str(self.events_log_file),
                    "console_log": str(self.console_log_file),
                },
            }

    def cleanup(self):
        """Log the session end and detach the handlers added by this session."""
        self.log_event("session_ended", data={"total_events_logged": len(self.log_entries) + 1})
        package_logger = logging.getLogger("tubenorm")
        for handler in self._handlers:
            package_logger.removeHandler(handler)
            handler.close()
        self._handlers.clear()
        if not package_logger.handlers:
            package_logger.propagate = True


_log_manager: Optional[RunLogManager] = None


def initialize_logging(
    log_dir: Union[str, Path] = "logs",
    session_id: Optional[str] = None,
    non_blocking: bool = False,
) -> RunLogManager:
    """Initialize the global logging system."""
    global _log_manager
    _log_manager = RunLogManager(log_dir, session_id, non_blocking)
    return _log_manager


def get_log_manager() -> Optional[RunLogManager]:
    """Get the current log manager instance."""
    return _log_manager


def cleanup_logging():
    """Cleanup the global logging system."""
    global _log_manager
    if _log_manager:
        _log_manager.cleanup()
        _log_manager = None
