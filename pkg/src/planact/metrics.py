"""Plan-quality metrics over tool-name sequences.

The three core scores share one normalization pattern: an edit distance over
tool names, divided by the longer sequence length, inverted so that 1.0 is a
perfect match.

  plan score    = 1 - L(pred, ref) / max(len(pred), len(ref))
  replan score  = the same, applied to the suffixes from the failure index on
  dependency coverage = satisfied ordering pairs / induced ordering pairs

All 0/0 cases resolve to 1.0: an empty plan compared to an empty reference,
and a plan inducing no dependency pairs, are vacuously perfect.

Every function is pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


def levenshtein(a: Sequence[str], b: Sequence[str]) -> int:
    """Minimum number of single-item insertions, deletions, or substitutions
    turning sequence ``a`` into ``b``.

    Classic two-row dynamic program. Symmetric, satisfies the triangle
    inequality, and is bounded by max(len(a), len(b)).
    """
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, item_a in enumerate(a, start=1):
        current = [i]
        append = current.append
        prev_row = previous
        for j, item_b in enumerate(b, start=1):
            cost = 0 if item_a == item_b else 1
            append(min(prev_row[j] + 1, current[j - 1] + 1, prev_row[j - 1] + cost))
        previous = current
    return previous[-1]


def weighted_levenshtein(
    a: Sequence[str], b: Sequence[str], weights: Mapping[str, float]
) -> float:
    """Edit distance where touching token t costs weights.get(t, 1).

    Substituting a for b costs max(w(a), w(b)). With an all-ones table this
    reduces to ``levenshtein``. Extension point; nothing in the core suite
    passes weights.
    """
    def w(token: str) -> float:
        return weights.get(token, 1.0)

    previous = [0.0]
    for item_b in b:
        previous.append(previous[-1] + w(item_b))
    for item_a in a:
        current = [previous[0] + w(item_a)]
        for j, item_b in enumerate(b, start=1):
            sub = 0.0 if item_a == item_b else max(w(item_a), w(item_b))
            current.append(
                min(
                    previous[j] + w(item_a),
                    current[j - 1] + w(item_b),
                    previous[j - 1] + sub,
                )
            )
        previous = current
    return previous[-1]


def wped(
    pred: Sequence[str],
    ref: Sequence[str],
    weights: Mapping[str, float] | None = None,
) -> float:
    """Inverted, length-normalized edit distance between predicted and
    reference tool sequences; 1.0 means structurally identical."""
    if not pred and not ref:
        return 1.0
    if weights is None:
        distance = float(levenshtein(pred, ref))
        longest = float(max(len(pred), len(ref)))
    else:
        distance = weighted_levenshtein(pred, ref, weights)
        longest = max(
            sum(weights.get(t, 1.0) for t in pred),
            sum(weights.get(t, 1.0) for t in ref),
        )
    return 1.0 - distance / longest


@dataclass(frozen=True)
class DependencyRule:
    """An ordering constraint: every step using an after-set tool must be
    preceded (anywhere earlier) by a step using a before-set tool."""

    rule_id: str
    description: str
    before: frozenset[str]
    after: frozenset[str]

    def __post_init__(self):
        if self.before & self.after:
            raise ValueError(
                f"rule {self.rule_id}: before and after sets overlap: "
                f"{sorted(self.before & self.after)}"
            )


def induced_pairs(
    tools: Sequence[str], rule: DependencyRule
) -> tuple[int, int]:
    """(satisfied, total) ordering pairs the rule induces on the sequence.

    Each occurrence of an after-set tool induces one pair, anchored to the
    nearest prior before-set step; with no such step the pair is unsatisfied.
    """
    satisfied = 0
    total = 0
    last_before = -1
    for index, name in enumerate(tools):
        if name in rule.after:
            total += 1
            if last_before >= 0:
                satisfied += 1
        if name in rule.before:
            last_before = index
    return satisfied, total


def depcov(tools: Sequence[str], rules: Iterable[DependencyRule]) -> float:
    """Fraction of rule-induced ordering dependencies the sequence satisfies."""
    satisfied = 0
    total = 0
    for rule in rules:
        s, t = induced_pairs(tools, rule)
        satisfied += s
        total += t
    if total == 0:
        return 1.0
    return satisfied / total


def replanq(
    orig: Sequence[str], replanned: Sequence[str], failure_index: int
) -> float:
    """Similarity of the original and revised plans from the failure point on.

    ``failure_index`` is the 0-based position of the step that failed; both
    suffixes start there. Rewrites limited to the failed step score 1.0.
    """
    if failure_index < 0 or failure_index > len(orig):
        raise IndexError(
            f"failure index {failure_index} outside 0..{len(orig)}"
        )
    suffix_a = orig[failure_index:]
    suffix_b = replanned[failure_index:]
    if not suffix_a and not suffix_b:
        return 1.0
    distance = levenshtein(suffix_a, suffix_b)
    return 1.0 - distance / max(len(suffix_a), len(suffix_b))


@dataclass
class MetricReport:
    """Scores for one run. Absent metrics stay None (e.g. replanq with no
    failure injected)."""

    wped: float | None = None
    depcov: float | None = None
    replanq: float | None = None
    success: bool = False
    notes: str = ""


def success_rate(reports: Sequence[MetricReport]) -> float:
    """Fraction of runs that produced a structurally valid plan (wped > 0)."""
    if not reports:
        raise ValueError("success_rate over an empty report list")
    hits = sum(1 for r in reports if r.wped is not None and r.wped > 0)
    return hits / len(reports)


def qa_accuracy(predicted: Sequence[str], gold: Sequence[str]) -> float:
    """Exact-match fraction over paired answer lists."""
    if len(predicted) != len(gold):
        raise ValueError(
            f"answer lists differ in length: {len(predicted)} vs {len(gold)}"
        )
    if not gold:
        return 1.0
    return sum(1 for p, g in zip(predicted, gold) if p == g) / len(gold)


@dataclass(frozen=True)
class JudgeVote:
    judge_id: str
    preference: str  # "A", "B", or "tie"


def aggregate_judgments(votes: Sequence[JudgeVote]) -> str | None:
    """Majority vote over non-tie preferences; an exact split discards the
    instance (returns None)."""
    if not votes:
        raise ValueError("no votes to aggregate")
    a = sum(1 for v in votes if v.preference == "A")
    b = sum(1 for v in votes if v.preference == "B")
    if a > b:
        return "A"
    if b > a:
        return "B"
    return None


# ---------------------------------------------------------------------------
# Default rule set

GENERATION_TOOLS = frozenset(
    {
        "text2video_gen",
        "image2video_gen",
        "video_extension",
        "frame2frame_video_gen",
        "storyvideo_gen",
        "entity2video",
    }
)
INGESTION_TOOLS = frozenset({"materials_search"})
EDITING_TOOLS = frozenset(
    {
        "swap_object_tool",
        "repainting",
        "depth_modify",
        "recolor",
        "pose_reference",
        "style_transfer",
    }
)
UNDERSTANDING_TOOLS = frozenset(
    {
        "vision2text_gen",
        "video_timestamp_analysis",
        "main_object_analysis",
        "longvideo_understanding",
    }
)

GEN_BEFORE_EDIT = DependencyRule(
    rule_id="gen_before_edit",
    description="content must be generated or ingested before it is edited",
    before=GENERATION_TOOLS | INGESTION_TOOLS,
    after=EDITING_TOOLS,
)

# Stricter optional rule: analyze footage before editing it. Not part of the
# default set; opt in explicitly when the task starts from uncaptioned video.
UNDERSTAND_BEFORE_EDIT = DependencyRule(
    rule_id="understand_before_edit",
    description="footage should be analyzed before it is edited",
    before=UNDERSTANDING_TOOLS,
    after=EDITING_TOOLS,
)


def default_rules() -> list[DependencyRule]:
    return [GEN_BEFORE_EDIT]
