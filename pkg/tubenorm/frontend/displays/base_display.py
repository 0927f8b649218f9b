"""
Base Display Interface for tubenorm runs

Defines the interface that all display implementations must follow.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Mapping, Optional, Sequence


class BaseDisplay(ABC):
    """Abstract base class for run displays."""

    def __init__(self, command: str, **kwargs):
        """Initialize display with the command being run and configuration."""
        self.command = command
        self.progress_messages: List[str] = []
        self.results: Dict[str, Mapping[str, Any]] = {}
        self.artifacts: List[str] = []
        self.config = kwargs

    @abstractmethod
    def initialize(self, summary: Mapping[str, Any], log_dir: Optional[str] = None):
        """Show the run header.

        Args:
            summary: Short description of the run (curve, eps values, grid)
            log_dir: Session log directory, if file logging is enabled
        """
        pass

    @abstractmethod
    def update_progress(self, message: str):
        """Report one finished step (a solve, a mesh level)."""
        pass

    @abstractmethod
    def show_result(self, title: str, values: Mapping[str, Any]):
        """Display a block of named scalar results."""
        pass

    @abstractmethod
    def show_table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        """Display tabular results, one row per eps or mesh level."""
        pass

    @abstractmethod
    def show_error(self, message: str):
        pass

    def show_artifacts(self, paths: Sequence[str]):
        """Record and list the files written by the run."""
        self.artifacts.extend(str(path) for path in paths)

    def cleanup(self):
        """Clean up display resources."""
        pass

    def get_progress(self) -> List[str]:
        return list(self.progress_messages)


def format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)
