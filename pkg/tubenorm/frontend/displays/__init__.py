"""
tubenorm Display Components

Terminal output for run headers, progress and result tables.
"""

from .base_display import BaseDisplay
from .rich_terminal_display import RichTerminalDisplay, create_rich_display, is_rich_available
from .simple_display import SimpleDisplay


def create_display(display_type: str, command: str, **kwargs) -> BaseDisplay:
    """Display for ``display_type`` ("rich_terminal" or "simple"), falling back to simple without Rich."""
    if display_type == "simple":
        return SimpleDisplay(command, **kwargs)
    if display_type == "rich_terminal":
        if not is_rich_available():
            print("⚠️  Rich library not available. Falling back to simple display.")
            print("   Install with: pip install rich")
            return SimpleDisplay(command, **kwargs)
        return RichTerminalDisplay(command, **kwargs)
    raise ValueError(f"Unknown display type: {display_type}")


__all__ = [
    "BaseDisplay",
    "SimpleDisplay",
    "RichTerminalDisplay",
    "is_rich_available",
    "create_rich_display",
    "create_display",
]
