"""
tubenorm Frontend Package

Terminal displays, session logging and artifact output for CLI runs.
"""

from .displays import SimpleDisplay, create_display
from .logging import ArtifactWriter, RunLogManager
from .plot_script import emit_plot_script, render_plot_script

__all__ = [
    "SimpleDisplay",
    "create_display",
    "ArtifactWriter",
    "RunLogManager",
    "emit_plot_script",
    "render_plot_script",
]
