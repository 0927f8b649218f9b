"""
Simple Display for tubenorm runs

Plain text output for non-interactive use, CI logs and debugging.
"""

from typing import Any, Mapping, Optional, Sequence

from .base_display import BaseDisplay, format_value


class SimpleDisplay(BaseDisplay):
    """Simple text-based display with minimal formatting."""

    def __init__(self, command: str, **kwargs):
        super().__init__(command, **kwargs)
        self.show_progress = kwargs.get("show_progress", True)

    def initialize(self, summary: Mapping[str, Any], log_dir: Optional[str] = None):
        print(f"🚀 tubenorm {self.command}")
        for key, value in summary.items():
            print(f"   {key}: {format_value(value)}")
        if log_dir:
            print(f"📁 Log directory: {log_dir}")
        print("=" * 50)

    def update_progress(self, message: str):
        self.progress_messages.append(message)
        if self.show_progress:
            print(f"📊 {message}")

    def show_result(self, title: str, values: Mapping[str, Any]):
        self.results[title] = dict(values)
        print(f"\n✅ {title}")
        width = max((len(key) for key in values), default=0)
        for key, value in values.items():
            print(f"   {key.ljust(width)}  {format_value(value)}")

    def show_table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        print(f"\n{title}")
        print("   " + "  ".join(str(column).rjust(16) for column in columns))
        for row in rows:
            print("   " + "  ".join(format_value(item).rjust(16) for item in row))

    def show_error(self, message: str):
        print(f"❌ {message}", flush=True)

    def show_artifacts(self, paths: Sequence[str]):
        super().show_artifacts(paths)
        for path in paths:
            print(f"📁 {path}")
