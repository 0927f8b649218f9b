"""
Rich Terminal Display for tubenorm runs

Result panels and tables rendered with the Rich library. Rich is optional:
``is_rich_available`` reports whether it imported, and the CLI falls back to
the simple display when it did not.
"""

from typing import Any, Mapping, Optional, Sequence

from .base_display import BaseDisplay, format_value

try:
    from rich.box import ROUNDED
    from rich.console import Console
    from rich.panel import Panel
    from rich.table import Table
    from rich.text import Text

    RICH_AVAILABLE = True
except ImportError:
    RICH_AVAILABLE = False

    # Placeholders so annotations resolve without Rich
    class Console:  # type: ignore[no-redef]
        pass

    class Panel:  # type: ignore[no-redef]
        pass

    class Table:  # type: ignore[no-redef]
        pass


class RichTerminalDisplay(BaseDisplay):
    """Rich-formatted run display."""

    def __init__(self, command: str, **kwargs):
        """Initialize rich terminal display.

        Args:
            command: The command being run
            **kwargs: Additional configuration options
                - theme: 'dark' or 'light' (default: 'dark')
                - console: Console instance to render into (default: a new one)
        """
        if not RICH_AVAILABLE:
            raise ImportError(
                "Rich library is required for RichTerminalDisplay. "
                "Install with: pip install rich"
            )
        super().__init__(command, **kwargs)
        self.console = kwargs.get("console") or Console()
        self.theme = kwargs.get("theme", "dark")
        self.colors = self._setup_theme()

    def _setup_theme(self):
        if self.theme == "light":
            return {"header": "bold blue", "key": "blue", "value": "black", "border": "blue", "error": "bold red"}
        return {"header": "bold cyan", "key": "cyan", "value": "white", "border": "bright_blue", "error": "bold red"}

    def initialize(self, summary: Mapping[str, Any], log_dir: Optional[str] = None):
        header = Text()
        header.append(f"🚀 tubenorm {self.command}", style=self.colors["header"])
        for key, value in summary.items():
            header.append(f"\n{key}: ", style=self.colors["key"])
            header.append(format_value(value), style=self.colors["value"])
        if log_dir:
            header.append(f"\n📁 {log_dir}", style="dim")
        self.console.print(Panel(header, box=ROUNDED, border_style=self.colors["border"]))

    def update_progress(self, message: str):
        self.progress_messages.append(message)
        self.console.print(f"[dim]•[/dim] {message}")

    def show_result(self, title: str, values: Mapping[str, Any]):
        self.results[title] = dict(values)
        table = Table(box=ROUNDED, show_header=False, border_style=self.colors["border"])
        table.add_column(style=self.colors["key"])
        table.add_column(style=self.colors["value"], justify="right")
        for key, value in values.items():
            table.add_row(key, format_value(value))
        self.console.print(Panel(table, title=f"✅ {title}", border_style=self.colors["border"]))

    def show_table(self, title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]):
        table = Table(title=title, box=ROUNDED, border_style=self.colors["border"])
        for column in columns:
            table.add_column(str(column), justify="right")
        for row in rows:
            table.add_row(*(format_value(item) for item in row))
        self.console.print(table)

    def show_error(self, message: str):
        self.console.print(f"❌ {message}", style=self.colors["error"])

    def show_artifacts(self, paths: Sequence[str]):
        super().show_artifacts(paths)
        for path in paths:
            self.console.print(f"📁 {path}", style="dim")


def is_rich_available() -> bool:
    """Check if Rich library is available."""
    return RICH_AVAILABLE


def create_rich_display(command: str, **kwargs) -> RichTerminalDisplay:
    """Create a RichTerminalDisplay instance.

    Raises:
        ImportError: If Rich library is not available
    """
    return RichTerminalDisplay(command, **kwargs)
