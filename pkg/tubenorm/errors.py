"""
Root exceptions for tubenorm.

Each sub-package defines its own errors next to the code that raises them and
derives them from ``TubeNormError`` so the CLI can map any solver failure to a
single exit status.
"""


class TubeNormError(Exception):
    """Base class for every error raised by tubenorm."""


class IoFailure(TubeNormError):
    """An artifact or log file could not be written."""
