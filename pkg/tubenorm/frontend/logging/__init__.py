"""Run logging and artifact output."""

from .artifact_writer import ArtifactWriter
from .run_log_manager import (
    RunLogManager,
    cleanup_logging,
    get_log_manager,
    initialize_logging,
)

__all__ = [
    "ArtifactWriter",
    "RunLogManager",
    "initialize_logging",
    "get_log_manager",
    "cleanup_logging",
]
