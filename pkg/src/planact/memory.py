"""Three-level memory: global traces, per-session task memory, user materials.

Retrieval is a deterministic token-overlap cosine over lowercased tokens; the
scorer is a plain function so a different similarity can be swapped in without
touching the stores. Each store persists as one JSON record per line.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from .canon import digest
from .hub.model import Artifact, artifact_from_json, artifact_to_json
from .storyboard import Storyboard

_TOKEN = re.compile(r"[a-z0-9]+")

COMPLETED = "completed"
ABORTED = "aborted"


def tokenize(text: str) -> set[str]:
    return set(_TOKEN.findall(text.lower()))


def token_overlap_cosine(a: set[str], b: set[str]) -> float:
    """|A ∩ B| / sqrt(|A||B|) over token sets; 0.0 when either side is empty."""
    if not a or not b:
        return 0.0
    return len(a & b) / (len(a) * len(b)) ** 0.5


@dataclass
class GlobalTrace:
    trace_id: str
    goal_text: str
    tool_sequence: list[str]
    outcome: str  # completed | aborted
    score: float | None = None


@dataclass
class UserMaterial:
    material_id: str
    uri: str
    kind: str
    tags: list[str]
    added_at: int

    def __post_init__(self):
        if not self.tags:
            raise ValueError(f"material {self.material_id} needs at least one tag")
        self.tags = [t.lower() for t in self.tags]


class GlobalStore:
    """Cross-task trace memory, ranked by goal-text similarity."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path else None
        self._traces: list[GlobalTrace] = []
        self._lock = threading.Lock()
        if self._path and self._path.exists():
            self.load()

    def __len__(self) -> int:
        return len(self._traces)

    def add(self, trace: GlobalTrace) -> None:
        if trace.outcome == COMPLETED and not trace.tool_sequence:
            raise ValueError("a completed trace needs a non-empty tool sequence")
        with self._lock:
            self._traces.append(trace)
            if self._path:
                with self._path.open("a", encoding="utf-8") as handle:
                    handle.write(self._to_line(trace) + "\n")

    def next_trace_id(self) -> str:
        return f"trace-{len(self._traces):05d}"

    def retrieve(self, goal_text: str, k: int) -> list[GlobalTrace]:
        """Top-k by token-overlap cosine; zero-score traces are never returned;
        ties break toward the newest trace_id."""
        query = tokenize(goal_text)
        scored = [
            (token_overlap_cosine(query, tokenize(t.goal_text)), t.trace_id, t)
            for t in self._traces
        ]
        scored = [entry for entry in scored if entry[0] > 0.0]
        scored.sort(key=lambda entry: (-entry[0], _desc(entry[1])))
        return [entry[2] for entry in scored[:k]]

    @staticmethod
    def _to_line(trace: GlobalTrace) -> str:
        return json.dumps(
            {
                "trace_id": trace.trace_id,
                "goal_text": trace.goal_text,
                "tool_sequence": trace.tool_sequence,
                "outcome": trace.outcome,
                "score": trace.score,
            },
            ensure_ascii=False,
            sort_keys=True,
        )

    def save(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self._path
        if target is None:
            raise ValueError("no path configured for the global store")
        target.write_text(
            "".join(self._to_line(t) + "\n" for t in self._traces), encoding="utf-8"
        )

    def load(self, path: str | Path | None = None) -> None:
        source = Path(path) if path else self._path
        self._traces = []
        if source is None or not source.exists():
            return
        for line in source.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            self._traces.append(
                GlobalTrace(
                    trace_id=obj["trace_id"],
                    goal_text=obj["goal_text"],
                    tool_sequence=list(obj["tool_sequence"]),
                    outcome=obj["outcome"],
                    score=obj.get("score"),
                )
            )


def _desc(trace_id: str) -> tuple:
    # Sort helper: newest (lexicographically greatest) id first.
    return tuple(-ord(c) for c in trace_id)


class UserStore:
    """Per-user materials (tag-searchable) and preferences."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path else None
        self.materials: list[UserMaterial] = []
        self.preferences: dict[str, str] = {}
        self._lock = threading.Lock()
        if self._path and self._path.exists():
            self.load()

    def add_material(self, material: UserMaterial) -> None:
        with self._lock:
            self.materials.append(material)

    def set_preference(self, key: str, value: str) -> None:
        with self._lock:
            self.preferences[key] = value

    def preference_lines(self) -> list[str]:
        return [f"{key}={value}" for key, value in sorted(self.preferences.items())]

    def retrieve(self, query_text: str, k: int) -> list[UserMaterial]:
        query = tokenize(query_text)
        scored = [
            (token_overlap_cosine(query, set(m.tags)), m.added_at, m.material_id, m)
            for m in self.materials
        ]
        scored = [entry for entry in scored if entry[0] > 0.0]
        # Equal overlap: newer added_at first, then id for full determinism.
        scored.sort(key=lambda entry: (-entry[0], -entry[1], entry[2]))
        return [entry[3] for entry in scored[:k]]

    def material_uris(self) -> set[str]:
        return {m.uri for m in self.materials}

    def save(self, path: str | Path | None = None) -> None:
        target = Path(path) if path else self._path
        if target is None:
            raise ValueError("no path configured for the user store")
        lines = [
            json.dumps({"pref": [k, v]}, ensure_ascii=False, sort_keys=True)
            for k, v in sorted(self.preferences.items())
        ]
        lines += [
            json.dumps(
                {
                    "material_id": m.material_id,
                    "uri": m.uri,
                    "kind": m.kind,
                    "tags": m.tags,
                    "added_at": m.added_at,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
            for m in self.materials
        ]
        target.write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    def load(self, path: str | Path | None = None) -> None:
        source = Path(path) if path else self._path
        self.materials = []
        self.preferences = {}
        if source is None or not source.exists():
            return
        for line in source.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "pref" in obj:
                key, value = obj["pref"]
                self.preferences[key] = value
            else:
                self.materials.append(
                    UserMaterial(
                        material_id=obj["material_id"],
                        uri=obj["uri"],
                        kind=obj["kind"],
                        tags=list(obj["tags"]),
                        added_at=obj["added_at"],
                    )
                )


class TaskMemory:
    """Session-scoped working memory: step outputs, call memos, one storyboard."""

    def __init__(self, session_id: str):
        self.session_id = session_id
        self.step_outputs: dict[int, Artifact] = {}
        self.memos: dict[tuple[str, str], Artifact] = {}
        self.storyboard: Storyboard | None = None
        self.storyboard_writes = 0

    def record_step_output(self, step_number: int, artifact: Artifact) -> None:
        self.step_outputs[step_number] = artifact

    def memo_key(self, tool_name: str, arguments: dict) -> tuple[str, str]:
        return (tool_name, digest(arguments))

    def memo_lookup(self, tool_name: str, arguments: dict) -> Artifact | None:
        return self.memos.get(self.memo_key(tool_name, arguments))

    def memo_store(self, tool_name: str, arguments: dict, artifact: Artifact) -> None:
        self.memos[self.memo_key(tool_name, arguments)] = artifact

    def write_storyboard(self, sb: Storyboard) -> None:
        self.storyboard = sb
        self.storyboard_writes += 1

    def save(self, path: str | Path) -> None:
        lines = []
        for step_number, artifact in sorted(self.step_outputs.items()):
            lines.append(
                json.dumps(
                    {"step_output": step_number, "artifact": artifact_to_json(artifact)},
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
        for (tool, args_digest), artifact in sorted(self.memos.items()):
            lines.append(
                json.dumps(
                    {
                        "memo": [tool, args_digest],
                        "artifact": artifact_to_json(artifact),
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")

    def load(self, path: str | Path) -> None:
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            artifact = artifact_from_json(obj["artifact"])
            if "step_output" in obj:
                self.step_outputs[obj["step_output"]] = artifact
            else:
                tool, args_digest = obj["memo"]
                self.memos[(tool, args_digest)] = artifact


class MemoryHub:
    """The three stores plus the enabled-level switchboard.

    Disabling ``task`` turns off result reuse (memo hits); step outputs still
    flow between steps because they are session execution state, not a cache.
    """

    LEVELS = ("global", "user", "task")

    def __init__(
        self,
        global_store: GlobalStore | None = None,
        user_store: UserStore | None = None,
        enabled: set[str] | frozenset[str] | None = None,
    ):
        self.global_store = global_store or GlobalStore()
        self.user_store = user_store or UserStore()
        self.enabled = frozenset(self.LEVELS if enabled is None else enabled)
        for level in self.enabled:
            if level not in self.LEVELS:
                raise ValueError(f"unknown memory level {level!r}")
        self._tasks: dict[str, TaskMemory] = {}

    def task(self, session_id: str) -> TaskMemory:
        if session_id not in self._tasks:
            self._tasks[session_id] = TaskMemory(session_id)
        return self._tasks[session_id]

    def drop_task(self, session_id: str) -> None:
        self._tasks.pop(session_id, None)

    def memo_lookup(self, session_id: str, tool_name: str, arguments: dict) -> Artifact | None:
        if "task" not in self.enabled:
            return None
        return self.task(session_id).memo_lookup(tool_name, arguments)

    def memo_store(self, session_id: str, tool_name: str, arguments: dict, artifact: Artifact) -> None:
        if "task" in self.enabled:
            self.task(session_id).memo_store(tool_name, arguments, artifact)

    def global_retrieve(self, goal_text: str, k: int) -> list[GlobalTrace]:
        if "global" not in self.enabled:
            return []
        return self.global_store.retrieve(goal_text, k)

    def user_retrieve(self, query_text: str, k: int) -> list[UserMaterial]:
        if "user" not in self.enabled:
            return []
        return self.user_store.retrieve(query_text, k)

    def record_trace(
        self,
        session_id: str,
        goal_text: str,
        tool_sequence: list[str],
        outcome: str,
        score: float | None = None,
    ) -> GlobalTrace | None:
        """Export the finished session into global memory and drop its task
        memory. Returns None when global memory is disabled or there is
        nothing to keep (a completed run with zero executed tools)."""
        if outcome not in (COMPLETED, ABORTED):
            raise ValueError(f"outcome must be completed or aborted, got {outcome!r}")
        self.drop_task(session_id)
        if "global" not in self.enabled:
            return None
        if outcome == COMPLETED and not tool_sequence:
            return None
        trace = GlobalTrace(
            trace_id=self.global_store.next_trace_id(),
            goal_text=goal_text,
            tool_sequence=list(tool_sequence),
            outcome=outcome,
            score=score,
        )
        self.global_store.add(trace)
        return trace
