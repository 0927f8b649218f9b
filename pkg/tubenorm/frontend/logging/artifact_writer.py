"""
Serialised artifact output.

Every file a run produces goes through one ``ArtifactWriter``: JSON results
wrapped in the run envelope, CSV tables and plain-text scripts. CSV and text
files open with a "#" comment line carrying the envelope's command, config
hash, seed and versions. Writes hold a lock so concurrent sweep workers cannot
interleave files, and output is deterministic: sorted keys, 12 significant
digits, UTF-8, LF line endings.
"""

import csv
import io
import json
import logging
import threading
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

from ...errors import IoFailure
from ...utils import format_float, normalise
from .run_log_manager import RunLogManager

logger = logging.getLogger(__name__)

PROVENANCE_KEYS = ("command", "config_hash", "seed")


def provenance_comment(envelope: Mapping[str, Any]) -> str:
    """Single "# key=value ..." line identifying the run; empty without an envelope."""
    parts = [f"{key}={envelope[key]}" for key in PROVENANCE_KEYS if key in envelope]
    versions = envelope.get("versions")
    if versions:
        parts.append("versions=" + ",".join(f"{k}:{v}" for k, v in sorted(versions.items())))
    return "# " + " ".join(parts) if parts else ""


class ArtifactWriter:
    """Writes run artifacts into one output directory."""

    def __init__(
        self,
        out_dir: Union[str, Path],
        envelope: Optional[Mapping[str, Any]] = None,
        log_manager: Optional[RunLogManager] = None,
    ):
        """
        Args:
            out_dir: Directory receiving the artifacts (created on first write)
            envelope: Fields placed around every JSON result (command, config_hash, ...)
            log_manager: Receives an ``artifact_written`` event per file
        """
        self.out_dir = Path(out_dir)
        self.envelope = dict(envelope or {})
        self.log_manager = log_manager
        self.written: List[Path] = []
        self._lock = threading.Lock()

    def _write(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        with self._lock:
            try:
                self.out_dir.mkdir(parents=True, exist_ok=True)
                with open(path, "w", encoding="utf-8", newline="\n") as handle:
                    handle.write(text)
            except OSError as exc:
                raise IoFailure(f"could not write {path}: {exc}") from exc
            self.written.append(path)
        logger.debug(f"Wrote {path}")
        if self.log_manager is not None:
            self.log_manager.log_artifact(path)
        return path

    def render_json(self, result: Any) -> str:
        document: Dict[str, Any] = dict(self.envelope)
        document["result"] = result
        return json.dumps(normalise(document), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def write_json(self, name: str, result: Any) -> Path:
        """Write ``result`` inside the run envelope."""
        return self._write(name, self.render_json(result))

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """Provenance line, mandatory header row, then rows at 12 significant digits."""
        if not header:
            raise ValueError("CSV artifacts need a header row")
        buffer = io.StringIO()
        comment = provenance_comment(self.envelope)
        if comment:
            buffer.write(comment + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(_cell(item) for item in row)
        return self._write(name, buffer.getvalue())

    def write_text(self, name: str, text: str) -> Path:
        """Text file (scripts use "#" comments) led by the provenance line."""
        comment = provenance_comment(self.envelope)
        if comment:
            text = comment + "\n" + text
        return self._write(name, text if text.endswith("\n") else text + "\n")


def _cell(item: Any) -> str:
    value = normalise(item)
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
