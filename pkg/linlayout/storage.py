"""JSON document and JSONL trace writers with automatic directory creation."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, TextIO


def write_json(path: Path, document: dict[str, Any]) -> None:
    """
    Write a document as indented JSON.

    Parent directories are created when missing. Keys keep insertion order
    so plan and report files are stable across runs.

    Args:
        path: Output file path.
        document: JSON-serialisable dictionary.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_json(path: Path) -> dict[str, Any]:
    """
    Read a JSON document written by write_json.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If the file is not a JSON object.
    """
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return data


class JsonlWriter:
    """
    Writer for JSONL (JSON Lines) trace files.

    Each record is one line of JSON. The file is truncated on open so a
    trace always describes exactly one run.

    Examples:
        >>> from pathlib import Path
        >>> with JsonlWriter(Path("out/trace.jsonl")) as writer:
        ...     writer.write({"round": 0, "lane": 3})
    """

    def __init__(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        self._path = path
        self._handle: TextIO = path.open("w", encoding="utf-8")
        self._count = 0

    @property
    def path(self) -> Path:
        """Get the output file path."""
        return self._path

    @property
    def count(self) -> int:
        """Number of records written so far."""
        return self._count

    def write(self, record: dict[str, Any]) -> None:
        """Serialize one record and append a newline."""
        self._handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        self._count += 1

    def close(self) -> None:
        """Close the file handle."""
        self._handle.close()

    def __enter__(self) -> JsonlWriter:
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.close()
