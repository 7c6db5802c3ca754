"""Tool registry: concurrent reads, serialized writes, replace-on-reregister."""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..errors import InvalidDescriptorError, UnknownToolError
from .model import (
    ARTIFACT_KINDS,
    ATOM,
    CATEGORIES,
    KINDS,
    PARAM_TYPES,
    ToolDescriptor,
    descriptor_from_json,
    descriptor_to_json,
)


class ToolRegistry:
    def __init__(self):
        self._tools: dict[tuple[str, str], ToolDescriptor] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._tools)

    def register(self, descriptor: ToolDescriptor) -> None:
        """Add or atomically replace the (server, name) entry."""
        self._check(descriptor)
        with self._write_lock:
            self._tools[(descriptor.server_name, descriptor.name)] = descriptor

    def _check(self, d: ToolDescriptor) -> None:
        if not d.name or not d.server_name:
            raise InvalidDescriptorError("descriptor needs a name and a server_name")
        if d.kind not in KINDS:
            raise InvalidDescriptorError(f"unknown kind {d.kind!r}")
        if d.category not in CATEGORIES:
            raise InvalidDescriptorError(f"unknown category {d.category!r}")
        if d.produces not in ARTIFACT_KINDS:
            raise InvalidDescriptorError(f"unknown artifact kind {d.produces!r}")
        seen = set()
        for p in d.params:
            if not p.name or p.name in seen:
                raise InvalidDescriptorError(f"bad or duplicate parameter {p.name!r}")
            if p.type not in PARAM_TYPES:
                raise InvalidDescriptorError(f"unknown parameter type {p.type!r}")
            seen.add(p.name)
        if d.kind == ATOM and d.expansion:
            raise InvalidDescriptorError("atom tools do not declare an expansion")
        for constituent in d.expansion:
            atom = self._by_name(constituent)
            if atom is None or atom.kind != ATOM:
                raise InvalidDescriptorError(
                    f"workflow {d.name} references unregistered atom {constituent!r}"
                )

    def _by_name(self, tool_name: str) -> ToolDescriptor | None:
        matches = [d for key, d in self._tools.items() if key[1] == tool_name]
        if not matches:
            return None
        # Tool names are unique in the seed catalog; on a clash, pick the
        # deterministic first by server name.
        return min(matches, key=lambda d: d.server_name)

    def get(self, server_name: str, tool_name: str) -> ToolDescriptor:
        try:
            return self._tools[(server_name, tool_name)]
        except KeyError:
            raise UnknownToolError(f"{server_name}/{tool_name}") from None

    def find(self, tool_name: str) -> ToolDescriptor:
        """Look a tool up by bare name (plan steps do not carry server names)."""
        descriptor = self._by_name(tool_name)
        if descriptor is None:
            raise UnknownToolError(tool_name)
        return descriptor

    def list(self, category: str | None = None) -> list[ToolDescriptor]:
        tools = [
            d for d in self._tools.values() if category is None or d.category == category
        ]
        return sorted(tools, key=lambda d: (d.name, d.server_name))

    def export_catalog(self, path: str | Path) -> None:
        payload = {"tools": [descriptor_to_json(d) for d in self.list()]}
        Path(path).write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    def import_catalog(self, path: str | Path) -> None:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        with self._write_lock:
            self._tools.clear()
        # Atoms first so workflow expansion references resolve.
        loaded = [descriptor_from_json(obj) for obj in payload["tools"]]
        for descriptor in sorted(loaded, key=lambda d: d.kind != ATOM):
            self.register(descriptor)
