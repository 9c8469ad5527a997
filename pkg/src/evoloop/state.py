"""Line-delimited JSON persistence for node records.

One self-describing JSON record per line, header first, so files are
append-friendly and runs can resume after a crash. Floats survive the
round trip bit-exactly (json uses shortest-repr encoding).
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable

from evoloop.errors import StateError
from evoloop.types import Node

STATE_FORMAT = "evoloop-state"
STATE_VERSION = 1


def encode_record(node: Node) -> str:
    return json.dumps({"kind": "node", **node.to_dict()}, allow_nan=False)


def _header_line(extra: dict[str, Any] | None = None) -> str:
    header = {"kind": "header", "format": STATE_FORMAT, "version": STATE_VERSION}
    if extra:
        header.update(extra)
    return json.dumps(header, allow_nan=False)


def write_state(path: str | Path, nodes: Iterable[Node], header_extra: dict[str, Any] | None = None) -> None:
    """Atomically write a snapshot: header line, then one record per node."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w", encoding="utf-8") as fh:
        fh.write(_header_line(header_extra) + "\n")
        for node in nodes:
            fh.write(encode_record(node) + "\n")
    os.replace(tmp, path)


def read_state(path: str | Path, *, recover: bool = False) -> tuple[dict[str, Any], list[Node]]:
    """Read (header, nodes) from a state file.

    With ``recover=False`` any unreadable record raises StateError naming
    its 1-based index. With ``recover=True`` a partial *final* record (the
    footprint of a crash mid-append) is dropped instead; corruption
    anywhere else still raises.
    """
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise StateError(0, "empty file, missing header")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise StateError(0, f"unreadable header: {exc}") from exc
    if header.get("kind") != "header" or header.get("format") != STATE_FORMAT:
        raise StateError(0, "not a state file header")

    nodes: list[Node] = []
    for index, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if raw.get("kind") != "node":
                raise ValueError(f"unexpected record kind {raw.get('kind')!r}")
            nodes.append(Node.from_dict(raw))
        except (ValueError, KeyError, TypeError) as exc:
            if recover and index == len(lines) - 1:
                break
            raise StateError(index, f"unreadable record: {exc}") from exc
    return header, nodes


class NodeLog:
    """Append-only node log backing a run directory.

    Appends are flushed and fsynced per record so that after a hard kill
    at most the final record is incomplete (which ``recover=True`` drops).
    """

    def __init__(self, path: str | Path, header_extra: dict[str, Any] | None = None):
        self.path = Path(path)
        if not self.path.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("w", encoding="utf-8") as fh:
                fh.write(_header_line(header_extra) + "\n")

    def append(self, node: Node) -> None:
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(encode_record(node) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def read(self, *, recover: bool = False) -> list[Node]:
        _, nodes = read_state(self.path, recover=recover)
        return nodes
