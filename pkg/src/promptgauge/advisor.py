"""Draft-prompt analysis: category scores, gap flags, suggestions.

Turns a five-field template (or a raw prompt) into a GapReport:
category scores on a 0-100 scale, gap flags with severity, exact
per-feature attributions under the effectiveness model, ranked
improvement suggestions, and the composed structured prompt.

The whole pipeline is deterministic for fixed inputs and assets, so the
serialized report is byte-stable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .assets import AssetBundle
from .corpus import Conversation, IssueStatus, Turn
from .errors import ContractError, InputError
from .features import (
    FeatureVector,
    Scope,
    apply_robust_scaler,
    extract_features,
    scaler_from_doc,
)
from .model import Attribution, ModelParams, attribute, model_from_doc
from .textmetrics import Sentence, split_sentences
from .tokens import TokenKind

DEFAULT_THRESHOLD = 50.0

SPECIFICITY_FAMILY = (
    "software_terms", "named_entities", "constraints", "modifiers",
    "subordinate_clauses", "repeated_2grams", "repeated_3grams",
)
RICHNESS_FAMILY = (
    "code_snippets", "mean_snippet_size", "error_messages",
    "code_descriptions", "first_prompt_length", "unique_info",
    "unique_words", "urls", "words", "sentences", "total_prompt_count",
)
CLARITY_FAMILY = (
    "misspellings", "incomplete_sentences", "flesch", "smog",
    "unresolved_references", "entailment",
)


class GapKind(Enum):
    MISSING_CONTEXT = "MissingContext"
    MULTIPLE_CONTEXT = "MultipleContext"
    UNCLEAR_INSTRUCTIONS = "UnclearInstructions"
    MISSING_SPECIFICATION = "MissingSpecification"


class Direction(Enum):
    INCREASE = "increase"
    DECREASE = "decrease"


@dataclass(frozen=True)
class TemplateFields:
    description: str = ""
    code_snippets: tuple[str, ...] = ()
    error_log: str = ""
    libraries_frameworks: str = ""
    resources: str = ""

    def is_empty(self) -> bool:
        return not (self.description.strip() or any(s.strip() for s in self.code_snippets)
                    or self.error_log.strip() or self.libraries_frameworks.strip()
                    or self.resources.strip())


@dataclass(frozen=True)
class CategoryScores:
    contextual_richness: float
    specificity: float
    clarity: float


@dataclass(frozen=True)
class GapFlag:
    kind: GapKind
    severity: float
    evidence: tuple[str, ...]


@dataclass(frozen=True)
class Suggestion:
    text: str
    target_feature: str
    expected_direction: Direction


@dataclass(frozen=True)
class GapReport:
    scores: CategoryScores
    probability_effective: float
    flags: tuple[GapFlag, ...]
    attributions: Attribution
    suggestions: tuple[Suggestion, ...]
    composed_prompt: str
    features: FeatureVector | None = field(repr=False, default=None)


FAMILIES: dict[str, tuple[str, ...]] = {
    "specificity": SPECIFICITY_FAMILY,
    "contextual_richness": RICHNESS_FAMILY,
    "clarity": CLARITY_FAMILY,
}

GAP_FAMILY: dict[GapKind, str] = {
    GapKind.MISSING_SPECIFICATION: "specificity",
    GapKind.MISSING_CONTEXT: "contextual_richness",
    GapKind.MULTIPLE_CONTEXT: "contextual_richness",
    GapKind.UNCLEAR_INSTRUCTIONS: "clarity",
}

_SUGGESTION_TEXT: dict[str, dict[Direction, str]] = {
    "software_terms": {
        Direction.INCREASE: "Name the concrete technologies involved (language, framework, library) so the request is unambiguous.",
    },
    "named_entities": {
        Direction.INCREASE: "Mention specific product, platform, or version names instead of generic references.",
    },
    "constraints": {
        Direction.INCREASE: "State hard requirements explicitly (must, only, at least ...) so the answer can honor them.",
    },
    "modifiers": {
        Direction.INCREASE: "Qualify the request with precise adjectives/adverbs (expected behavior, exact conditions).",
    },
    "subordinate_clauses": {
        Direction.INCREASE: "Add conditions that scope the request, e.g. 'If the library supports X, ...'.",
    },
    "repeated_2grams": {
        Direction.DECREASE: "Trim heavy phrase repetition; restate only the key points.",
    },
    "repeated_3grams": {
        Direction.INCREASE: "Reinforce the key phrase of the request once more so the goal stays in focus.",
    },
    "code_snippets": {
        Direction.INCREASE: "Add a short, focused code snippet that reproduces the problem.",
    },
    "mean_snippet_size": {
        Direction.DECREASE: "Shrink large code snippets to the minimal failing excerpt.",
    },
    "error_messages": {
        Direction.INCREASE: "Paste the exact error message or stack trace you are seeing.",
    },
    "code_descriptions": {
        Direction.DECREASE: "Tighten the prose around the code; describe only the identifiers that matter.",
    },
    "first_prompt_length": {
        Direction.INCREASE: "Expand the description: goal, what you tried, and what happened instead.",
    },
    "unique_info": {
        Direction.INCREASE: "Add new details instead of repeating the same words; every sentence should carry new information.",
    },
    "unique_words": {
        Direction.INCREASE: "Broaden the description with additional distinct details.",
    },
    "urls": {
        Direction.INCREASE: "Link the relevant documentation, issue, or repository.",
    },
    "words": {
        Direction.INCREASE: "Describe the problem in more detail; a few extra sentences of background help.",
    },
    "sentences": {
        Direction.INCREASE: "Break the description into a few complete sentences covering goal, attempt, and failure.",
    },
    "total_prompt_count": {
        Direction.INCREASE: "Iterate: follow up with the missing details the first answer asked for.",
    },
    "misspellings": {
        Direction.DECREASE: "Fix the misspelled words; run a spell checker over the prompt.",
    },
    "flesch": {
        Direction.INCREASE: "Simplify long sentences and prefer plain words to improve readability.",
    },
    "smog": {
        Direction.DECREASE: "Replace dense multi-syllable phrasing with simpler wording.",
    },
    "unresolved_references": {
        Direction.DECREASE: "Replace vague pronouns (it, this, they) with the thing they refer to.",
    },
    "entailment": {
        Direction.INCREASE: "Make consecutive sentences build on each other so the description reads as one coherent story.",
    },
}

_TOPIC_SHIFT_SUGGESTION = Suggestion(
    text="Keep the prompt focused on a single issue; reuse its key phrases instead of shifting topics mid-way.",
    target_feature="repeated_3grams",
    expected_direction=Direction.INCREASE,
)


def load_calibration(doc: dict) -> dict[str, dict]:
    out = {}
    for name, entry in doc.items():
        if name.startswith("_"):
            continue
        if name not in set(sum(FAMILIES.values(), ())):
            raise ContractError(f"unknown feature in calibration: {name}")
        direction = entry.get("direction", "higher")
        if direction not in ("higher", "lower"):
            raise ContractError(f"bad direction for {name}: {direction}")
        lo, hi = float(entry["lo"]), float(entry["hi"])
        if hi <= lo:
            raise ContractError(f"bad bounds for {name}: [{lo}, {hi}]")
        out[name] = {"lo": lo, "hi": hi, "direction": direction}
    return out


def fields_to_prompt(fields: TemplateFields) -> str:
    """Deterministic assembly of the structured prompt.

    Description paragraph, Environment line, fenced code blocks, fenced
    error output, references list; empty sections are omitted, and a
    description-only template reproduces the description verbatim.
    """
    if fields.is_empty():
        raise InputError("all template fields are empty")
    sections: list[str] = []
    if fields.description.strip():
        sections.append(fields.description.strip())
    if fields.libraries_frameworks.strip():
        sections.append(f"Environment: {fields.libraries_frameworks.strip()}")
    for snippet in fields.code_snippets:
        if snippet.strip():
            sections.append(f"```\n{snippet.strip()}\n```")
    if fields.error_log.strip():
        sections.append(f"Error output:\n```\n{fields.error_log.strip()}\n```")
    if fields.resources.strip():
        items = [part.strip() for chunk in fields.resources.splitlines()
                 for part in chunk.split(",")]
        refs = "\n".join(f"- {item}" for item in items if item)
        sections.append(f"References:\n{refs}")
    return "\n\n".join(sections)


def normalized_feature_scores(
    features: FeatureVector,
    calibration: dict[str, dict],
) -> dict[str, float]:
    """Per-feature goodness in [0,1]; 1 is best under the calibration."""
    out = {}
    for family in FAMILIES.values():
        for name in family:
            entry = calibration.get(name)
            if entry is None:
                raise ContractError(f"missing calibration entry: {name}")
            lo, hi = entry["lo"], entry["hi"]
            n = (features[name] - lo) / (hi - lo)
            n = min(max(n, 0.0), 1.0)
            out[name] = 1.0 - n if entry["direction"] == "lower" else n
    return out


def category_scores(
    features: FeatureVector,
    calibration: dict[str, dict],
) -> CategoryScores:
    """100 * mean normalized feature goodness per heuristic family."""
    normalized = normalized_feature_scores(features, calibration)

    def mean_of(family: tuple[str, ...]) -> float:
        return 100.0 * sum(normalized[n] for n in family) / len(family)

    return CategoryScores(
        contextual_richness=mean_of(RICHNESS_FAMILY),
        specificity=mean_of(SPECIFICITY_FAMILY),
        clarity=mean_of(CLARITY_FAMILY),
    )


def _topic_shift(sentences: list[Sentence]) -> bool:
    """First/last thirds share no 3-gram while both have >= 3 sentences."""
    prose = [s for s in sentences if any(t.kind is TokenKind.WORD for t in s.tokens)]
    third = len(prose) // 3
    if third < 3:
        return False
    first, last = prose[:third], prose[-third:]

    def grams(sents: list[Sentence]) -> set[tuple[str, ...]]:
        out = set()
        for s in sents:
            stream = [t.normalized for t in s.tokens
                      if t.kind is not TokenKind.PUNCTUATION]
            out.update(tuple(stream[i:i + 3]) for i in range(len(stream) - 2))
        return out

    g1, g2 = grams(first), grams(last)
    return bool(g1) and bool(g2) and not (g1 & g2)


def detect_gaps(
    scores: CategoryScores,
    features: FeatureVector,
    thresholds: dict[str, float] | None = None,
    calibration: dict[str, dict] | None = None,
    sentences: list[Sentence] | None = None,
) -> tuple[GapFlag, ...]:
    """Score-threshold flags plus the topic-shift proxy.

    A category strictly below its threshold raises the matching flag;
    severity is the relative shortfall. MultipleContext severity is
    fixed at 0.5 (the proxy is binary).
    """
    thresholds = thresholds or {}
    normalized = (normalized_feature_scores(features, calibration)
                  if calibration else None)

    def worst(family: tuple[str, ...]) -> tuple[str, ...]:
        if normalized is None:
            return family[:3]
        ranked = sorted(family, key=lambda n: (normalized[n], family.index(n)))
        return tuple(ranked[:3])

    flags = []
    checks = (
        ("contextual_richness", scores.contextual_richness, GapKind.MISSING_CONTEXT, RICHNESS_FAMILY),
        ("specificity", scores.specificity, GapKind.MISSING_SPECIFICATION, SPECIFICITY_FAMILY),
        ("clarity", scores.clarity, GapKind.UNCLEAR_INSTRUCTIONS, CLARITY_FAMILY),
    )
    for key, value, kind, family in checks:
        threshold = float(thresholds.get(key, DEFAULT_THRESHOLD))
        if value < threshold:
            severity = (threshold - value) / threshold if threshold > 0 else 1.0
            flags.append(GapFlag(kind, min(max(severity, 0.0), 1.0), worst(family)))
    if sentences is not None and _topic_shift(sentences):
        flags.append(GapFlag(GapKind.MULTIPLE_CONTEXT, 0.5, ("sentences", "words")))
    return tuple(flags)


def _direction_for(name: str, model: ModelParams, calibration: dict[str, dict]) -> Direction | None:
    """Improvement direction, or None when model and calibration disagree."""
    weight = model.weight_of(name)
    cal_dir = (Direction.INCREASE
               if calibration[name]["direction"] == "higher"
               else Direction.DECREASE)
    if weight > 0 and cal_dir is Direction.DECREASE:
        return None
    if weight < 0 and cal_dir is Direction.INCREASE:
        return None
    return cal_dir


def generate_suggestions(
    flags: tuple[GapFlag, ...],
    features: FeatureVector,
    model: ModelParams,
    calibration: dict[str, dict],
) -> tuple[Suggestion, ...]:
    """Targeted suggestions for the worst features behind each flag.

    Candidates are the three worst-normalized features of the flag's
    family, ordered by |model weight| then by deficit; a feature whose
    model sign contradicts its calibration direction is skipped, and
    every suggestion's direction matches the sign of its model weight.
    """
    normalized = normalized_feature_scores(features, calibration)
    suggestions: list[Suggestion] = []
    seen: set[str] = set()
    for flag in flags:
        if flag.kind is GapKind.MULTIPLE_CONTEXT:
            if _TOPIC_SHIFT_SUGGESTION.target_feature not in seen:
                suggestions.append(_TOPIC_SHIFT_SUGGESTION)
                seen.add(_TOPIC_SHIFT_SUGGESTION.target_feature)
            continue
        family = FAMILIES[GAP_FAMILY[flag.kind]]
        candidates = [n for n in family if _direction_for(n, model, calibration)]
        worst = sorted(candidates, key=lambda n: (normalized[n], family.index(n)))[:3]
        ranked = sorted(
            worst,
            key=lambda n: (-abs(model.weight_of(n)), -(1.0 - normalized[n])),
        )
        for name in ranked:
            if name in seen:
                continue
            direction = _direction_for(name, model, calibration)
            text = _SUGGESTION_TEXT.get(name, {}).get(direction)
            if text is None:
                verb = "Increase" if direction is Direction.INCREASE else "Reduce"
                text = f"{verb} {name.replace('_', ' ')} in the prompt."
            suggestions.append(Suggestion(text, name, direction))
            seen.add(name)
    return tuple(suggestions)


@dataclass(frozen=True)
class AdvisorRuntime:
    """Loaded model, scaler and calibration, ready for analyze calls."""

    assets: AssetBundle
    model: ModelParams
    calibration: dict[str, dict]
    scaler_doc: dict

    @classmethod
    def from_assets(cls, assets: AssetBundle) -> "AdvisorRuntime":
        from .errors import AssetError
        from .features import CANONICAL_FEATURES

        model = model_from_doc(assets.model_doc)
        scaler_doc = {k: v for k, v in assets.scaler_doc.items()
                      if not k.startswith("_")}
        unknown = set(model.feature_names) - set(CANONICAL_FEATURES)
        if unknown:
            raise AssetError(f"model uses unknown features: {sorted(unknown)}")
        unscaled = set(model.feature_names) - set(scaler_doc)
        if unscaled:
            raise AssetError(f"scaler asset missing features: {sorted(unscaled)}")
        return cls(
            assets=assets,
            model=model,
            calibration=load_calibration(assets.calibration_doc),
            scaler_doc=scaler_doc,
        )


def analyze(
    runtime: AdvisorRuntime,
    fields: TemplateFields | None = None,
    raw_prompt: str | None = None,
    thresholds: dict[str, float] | None = None,
    scorer=None,
) -> GapReport:
    """Full pipeline over a template or raw draft prompt."""
    if (fields is None) == (raw_prompt is None):
        raise InputError("provide exactly one of template fields or raw prompt")
    if fields is not None:
        composed = fields_to_prompt(fields)
    else:
        if not raw_prompt or not raw_prompt.strip():
            raise InputError("raw prompt is empty")
        composed = raw_prompt

    draft = Conversation(
        id="draft", issue_url="", issue_status=IssueStatus.OPEN,
        turns=(Turn(prompt_raw=composed, response_raw="", index=0),),
    )
    features = extract_features(draft, runtime.assets,
                                scope=Scope.FIRST_PROMPT_ONLY, scorer=scorer)
    scores = category_scores(features, runtime.calibration)

    scaler = scaler_from_doc(
        {k: v for k, v in runtime.scaler_doc.items()
         if k in runtime.model.feature_names}
    )
    by_name = dict(zip(scaler.feature_names,
                       apply_robust_scaler(scaler, features)))
    x = [by_name[n] for n in runtime.model.feature_names]
    attribution = attribute(runtime.model, x)

    from .codemetrics import extract_segments
    segs = extract_segments(composed, runtime.assets.error_patterns)
    sentences = split_sentences(segs.prose, runtime.assets.lexicons)

    flags = detect_gaps(scores, features, thresholds,
                        runtime.calibration, sentences)
    suggestions = generate_suggestions(flags, features, runtime.model,
                                       runtime.calibration)
    return GapReport(
        scores=scores,
        probability_effective=attribution.probability,
        flags=flags,
        attributions=attribution,
        suggestions=suggestions,
        composed_prompt=composed,
        features=features,
    )


def report_to_dict(report: GapReport) -> dict:
    """Stable field order; the JSON of this dict is the wire format."""
    return {
        "scores": {
            "contextual_richness": report.scores.contextual_richness,
            "specificity": report.scores.specificity,
            "clarity": report.scores.clarity,
        },
        "probability_effective": report.probability_effective,
        "flags": [
            {"kind": f.kind.value, "severity": f.severity,
             "evidence": list(f.evidence)}
            for f in report.flags
        ],
        "attributions": {
            "intercept": report.attributions.intercept,
            "logit": report.attributions.logit,
            "probability": report.attributions.probability,
            "contributions": report.attributions.as_dict(),
        },
        "suggestions": [
            {"text": s.text, "target_feature": s.target_feature,
             "expected_direction": s.expected_direction.value}
            for s in report.suggestions
        ],
        "composed_prompt": report.composed_prompt,
    }


def report_to_json(report: GapReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
