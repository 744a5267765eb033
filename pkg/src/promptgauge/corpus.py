"""Conversation corpus loading, validation, summaries, group tests.

The native corpus file is a UTF-8 JSON array of objects::

    {"id": str, "issue_url": str, "issue_status": "open"|"closed",
     "turns": [{"prompt": str, "response": str}]}

Unknown fields are ignored for forward compatibility. A second schema
id, ``devgpt-native``, accepts the raw DevGPT issue-sharings export and
maps it onto the same structures.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import scipy.stats

from .errors import CorpusParseError, InputError
from .tokens import TokenKind, tokenize

SCHEMA_MINIMAL = "devgpt-issues-v1"
SCHEMA_NATIVE = "devgpt-native"

ENGLISH_MIN_TOKENS = 20
ENGLISH_MIN_STOPWORD_RATIO = 0.05


class IssueStatus(Enum):
    OPEN = "open"
    CLOSED = "closed"


@dataclass(frozen=True)
class Turn:
    prompt_raw: str
    response_raw: str
    index: int


@dataclass(frozen=True)
class Conversation:
    id: str
    issue_url: str
    issue_status: IssueStatus
    turns: tuple[Turn, ...]
    language_ok: bool = True

    def prompts(self) -> list[str]:
        return [t.prompt_raw for t in self.turns]


@dataclass(frozen=True)
class LoadNotice:
    kind: str                      # "duplicate" | "invalid"
    record_id: str
    detail: str


@dataclass(frozen=True)
class LoadResult:
    conversations: tuple[Conversation, ...]
    notices: tuple[LoadNotice, ...]


@dataclass(frozen=True)
class GroupStats:
    minimum: float
    median: float
    maximum: float


@dataclass(frozen=True)
class CorpusSummary:
    n_conversations: int
    n_open: int
    n_closed: int
    prompts_open: int
    prompts_closed: int
    metrics_open: dict[str, GroupStats] = field(default_factory=dict)
    metrics_closed: dict[str, GroupStats] = field(default_factory=dict)


def lower_median(values: list[float]) -> float:
    """Median using the lower-middle element for even-length input."""
    if not values:
        raise InputError("median of empty list")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _validate_record(rec: dict, position: int) -> tuple[Conversation | None, LoadNotice | None]:
    rid = str(rec.get("id", f"<record {position}>"))
    for key in ("id", "issue_url", "issue_status", "turns"):
        if key not in rec:
            return None, LoadNotice("invalid", rid, f"missing required field: {key}")
    status_raw = str(rec["issue_status"]).strip().lower()
    if status_raw not in ("open", "closed"):
        return None, LoadNotice("invalid", rid, f"bad issue_status: {rec['issue_status']!r}")
    turns_raw = rec["turns"]
    if not isinstance(turns_raw, list) or not turns_raw:
        return None, LoadNotice("invalid", rid, "turns must be a non-empty list")
    turns = []
    for i, t in enumerate(turns_raw):
        if not isinstance(t, dict) or "prompt" not in t:
            return None, LoadNotice("invalid", rid, f"turn {i} missing field: prompt")
        prompt = t["prompt"]
        if not isinstance(prompt, str) or not prompt.strip():
            return None, LoadNotice("invalid", rid, f"turn {i} has empty prompt")
        turns.append(Turn(prompt_raw=prompt,
                          response_raw=str(t.get("response", "") or ""),
                          index=i))
    return Conversation(
        id=str(rec["id"]),
        issue_url=str(rec["issue_url"]),
        issue_status=IssueStatus(status_raw),
        turns=tuple(turns),
    ), None


def _native_to_minimal(doc) -> list[dict]:
    """Flatten a DevGPT issue-sharings export to the minimal schema."""
    records = []
    sources = doc.get("Sources", []) if isinstance(doc, dict) else doc
    for src in sources:
        issue_url = src.get("URL", "")
        status = str(src.get("State", src.get("Status", ""))).lower()
        for sharing in src.get("ChatgptSharing", []) or []:
            convs = sharing.get("Conversations") or []
            turns = [{"prompt": c.get("Prompt", ""),
                      "response": c.get("Answer", "")} for c in convs]
            records.append({
                "id": sharing.get("URL", ""),
                "issue_url": issue_url,
                "issue_status": status,
                "turns": turns,
            })
    return records


def load_corpus(source: bytes | str, schema: str = SCHEMA_MINIMAL) -> LoadResult:
    """Parse, validate and deduplicate a corpus stream.

    Duplicate ids keep the first occurrence; failing records are
    reported as notices, never silently dropped.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusParseError(exc.msg, exc.pos) from exc

    if schema == SCHEMA_MINIMAL:
        if not isinstance(doc, list):
            raise InputError("corpus root must be a JSON array")
        records = doc
    elif schema == SCHEMA_NATIVE:
        records = _native_to_minimal(doc)
    else:
        raise InputError(f"unknown corpus schema: {schema}")

    conversations: list[Conversation] = []
    notices: list[LoadNotice] = []
    seen: set[str] = set()
    for pos, rec in enumerate(records):
        if not isinstance(rec, dict):
            notices.append(LoadNotice("invalid", f"<record {pos}>", "not an object"))
            continue
        conv, notice = _validate_record(rec, pos)
        if notice is not None:
            notices.append(notice)
            continue
        assert conv is not None
        if conv.id in seen:
            notices.append(LoadNotice("duplicate", conv.id, "duplicate id, first kept"))
            continue
        seen.add(conv.id)
        conversations.append(conv)
    return LoadResult(tuple(conversations), tuple(notices))


def serialize_corpus(conversations: list[Conversation]) -> str:
    """Emit the minimal corpus schema; inverse of load_corpus."""
    records = [
        {
            "id": c.id,
            "issue_url": c.issue_url,
            "issue_status": c.issue_status.value,
            "turns": [{"prompt": t.prompt_raw, "response": t.response_raw}
                      for t in c.turns],
        }
        for c in conversations
    ]
    return json.dumps(records, indent=2, ensure_ascii=False)


class StopwordRatioDetector:
    """Bundled English detector: stop-word ratio over prose tokens.

    Keeps a conversation unless it has at least ENGLISH_MIN_TOKENS fully
    alphabetic word tokens and fewer than 5% of them are English stop
    words -- i.e. insufficient evidence defaults to keep.
    """

    def __init__(self, stopwords: frozenset[str]):
        self.stopwords = stopwords

    def __call__(self, prose: str) -> bool:
        words = [t.normalized for t in tokenize(prose)
                 if t.kind is TokenKind.WORD and t.surface.isalpha()]
        if len(words) < ENGLISH_MIN_TOKENS:
            return True
        hits = sum(1 for w in words if w in self.stopwords)
        return hits / len(words) >= ENGLISH_MIN_STOPWORD_RATIO


def detect_english(conversation: Conversation, detector) -> bool:
    """Run a language detector over the concatenated prompt text."""
    prose = "\n\n".join(conversation.prompts())
    return bool(detector(prose))


def with_language_flag(conversation: Conversation, detector) -> Conversation:
    return Conversation(
        id=conversation.id,
        issue_url=conversation.issue_url,
        issue_status=conversation.issue_status,
        turns=conversation.turns,
        language_ok=detect_english(conversation, detector),
    )


def corpus_stats(
    conversations: list[Conversation],
    features: list[dict[str, float]],
) -> CorpusSummary:
    """Group min/median/max per metric, split by issue status.

    Conversations flagged language_ok=False are excluded. Features must
    align 1:1 with conversations.
    """
    if len(conversations) != len(features):
        raise InputError("features must align 1:1 with conversations")
    kept = [(c, f) for c, f in zip(conversations, features) if c.language_ok]
    open_rows = [f for c, f in kept if c.issue_status is IssueStatus.OPEN]
    closed_rows = [f for c, f in kept if c.issue_status is IssueStatus.CLOSED]

    def group_metrics(rows: list[dict[str, float]]) -> dict[str, GroupStats]:
        if not rows:
            return {}
        names = rows[0].keys()
        return {
            name: GroupStats(
                minimum=min(r[name] for r in rows),
                median=lower_median([r[name] for r in rows]),
                maximum=max(r[name] for r in rows),
            )
            for name in names
        }

    return CorpusSummary(
        n_conversations=len(kept),
        n_open=len(open_rows),
        n_closed=len(closed_rows),
        prompts_open=sum(len(c.turns) for c, _ in kept
                         if c.issue_status is IssueStatus.OPEN),
        prompts_closed=sum(len(c.turns) for c, _ in kept
                           if c.issue_status is IssueStatus.CLOSED),
        metrics_open=group_metrics(open_rows),
        metrics_closed=group_metrics(closed_rows),
    )


def welch_ttest(a: list[float], b: list[float]) -> float:
    """Two-sided Welch t-test p-value.

    Degenerate zero-variance inputs: identical means report 1.0,
    differing means report 0.0.
    """
    if len(a) < 2 or len(b) < 2:
        raise InputError("each group needs at least 2 observations")
    mean_a = sum(a) / len(a)
    mean_b = sum(b) / len(b)
    var_a = sum((x - mean_a) ** 2 for x in a) / (len(a) - 1)
    var_b = sum((x - mean_b) ** 2 for x in b) / (len(b) - 1)
    if var_a == 0.0 and var_b == 0.0:
        return 1.0 if mean_a == mean_b else 0.0
    se2 = var_a / len(a) + var_b / len(b)
    t = (mean_a - mean_b) / math.sqrt(se2)
    df = se2 ** 2 / (
        (var_a / len(a)) ** 2 / (len(a) - 1)
        + (var_b / len(b)) ** 2 / (len(b) - 1)
    )
    return float(2.0 * scipy.stats.t.sf(abs(t), df))


def compare_groups(
    open_features: list[dict[str, float]],
    closed_features: list[dict[str, float]],
) -> dict[str, float]:
    """Per-metric Welch p-values between the two groups."""
    if not open_features or not closed_features:
        raise InputError("both groups must be non-empty")
    names = open_features[0].keys()
    return {
        name: welch_ttest([r[name] for r in open_features],
                          [r[name] for r in closed_features])
        for name in names
    }
