"""Feature assembly, VIF pruning, robust scaling, CSV interchange.

The 24 canonical metrics of one conversation (or one draft prompt) are
held in a FeatureVector keyed by canonical name. Conversation scope
sums count metrics over prompts and computes rate metrics over the
concatenated prose; FirstPromptOnly scope runs everything over a single
draft.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .assets import AssetBundle
from .codemetrics import code_metrics_from_parts, extract_segments
from .corpus import Conversation, IssueStatus
from .errors import ContractError, InputError
from .textmetrics import Sentence, split_sentences, text_metrics_from_parts
from .tokens import Token, TokenKind, tokenize

CANONICAL_FEATURES: tuple[str, ...] = (
    "software_terms",
    "named_entities",
    "constraints",
    "modifiers",
    "subordinate_clauses",
    "repeated_2grams",
    "repeated_3grams",
    "code_snippets",
    "mean_snippet_size",
    "error_messages",
    "code_descriptions",
    "first_prompt_length",
    "unique_info",
    "unique_words",
    "urls",
    "words",
    "sentences",
    "total_prompt_count",
    "misspellings",
    "incomplete_sentences",
    "flesch",
    "smog",
    "unresolved_references",
    "entailment",
)

VIF_THRESHOLD = 5.0
VIF_INFINITE = math.inf

LABEL_COLUMN = "issue_status"


class Scope(Enum):
    CONVERSATION = "conversation"
    FIRST_PROMPT_ONLY = "first_prompt_only"


@dataclass(frozen=True)
class FeatureVector:
    values: dict[str, float]
    flags: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        missing = set(CANONICAL_FEATURES) - set(self.values)
        extra = set(self.values) - set(CANONICAL_FEATURES)
        if missing or extra:
            raise ContractError(
                f"feature names mismatch: missing={sorted(missing)} extra={sorted(extra)}"
            )
        bad = [k for k, v in self.values.items() if not math.isfinite(v)]
        if bad:
            raise ContractError(f"non-finite features: {bad}")

    def __getitem__(self, name: str) -> float:
        return self.values[name]

    def as_row(self) -> list[float]:
        return [self.values[name] for name in CANONICAL_FEATURES]


@dataclass(frozen=True)
class FeatureSelection:
    retained: tuple[str, ...]
    removed: tuple[str, ...]
    vif: dict[str, float]


@dataclass(frozen=True)
class ScalerParams:
    feature_names: tuple[str, ...]
    medians: tuple[float, ...]
    iqrs: tuple[float, ...]

    def passthrough(self) -> tuple[bool, ...]:
        return tuple(iqr == 0.0 for iqr in self.iqrs)


def extract_features(
    conversation: Conversation,
    assets: AssetBundle,
    scope: Scope = Scope.CONVERSATION,
    scorer=None,
) -> FeatureVector:
    """Compute the 24 canonical metrics for one conversation."""
    lex = assets.lexicons
    prompts = (
        conversation.prompts()
        if scope is Scope.CONVERSATION
        else conversation.prompts()[:1]
    )
    segments = [extract_segments(p, assets.error_patterns) for p in prompts]
    per_prompt_tokens: list[list[Token]] = []
    per_prompt_sentences: list[list[Sentence]] = []
    for seg in segments:
        per_prompt_tokens.append(tokenize(seg.prose))
        per_prompt_sentences.append(split_sentences(seg.prose, lex))

    all_sentences = [s for group in per_prompt_sentences for s in group]
    concatenated = "\n\n".join(seg.prose for seg in segments)
    concat_tokens = tokenize(concatenated)
    concat_sentences = split_sentences(concatenated, lex)
    text = text_metrics_from_parts(concat_tokens, concat_sentences, lex, scorer)

    # count metrics summed per prompt; repetition is within-prompt only
    def summed(fn) -> int:
        return sum(fn(toks, sents) for toks, sents in
                   zip(per_prompt_tokens, per_prompt_sentences))

    from .textmetrics import (
        count_conditional_phrasing,
        count_incomplete_sentences,
        count_misspellings,
        count_named_entities,
        count_repeated_ngrams,
        count_software_terms,
        count_unresolved_references,
        lexical_density,
        prose_sentences,
    )

    constraints = modifiers = subordinate = 0
    for sents in per_prompt_sentences:
        c, m, s = count_conditional_phrasing(sents, lex)
        constraints += c
        modifiers += m
        subordinate += s

    code = code_metrics_from_parts(segments, all_sentences, prompts)
    first_tokens = per_prompt_tokens[0] if per_prompt_tokens else []
    first_prompt_length = sum(1 for t in first_tokens if t.kind is TokenKind.WORD)

    values = {
        "software_terms": summed(lambda t, s: count_software_terms(t, lex.se_terms)),
        "named_entities": summed(lambda t, s: count_named_entities(s)),
        "constraints": constraints,
        "modifiers": modifiers,
        "subordinate_clauses": subordinate,
        "repeated_2grams": summed(lambda t, s: count_repeated_ngrams(t, 2)),
        "repeated_3grams": summed(lambda t, s: count_repeated_ngrams(t, 3)),
        "code_snippets": code.code_snippets,
        "mean_snippet_size": code.mean_snippet_size,
        "error_messages": code.error_messages,
        "code_descriptions": code.code_descriptions,
        "first_prompt_length": first_prompt_length,
        "unique_info": text.unique_info,
        "unique_words": summed(lambda t, s: lexical_density(t)[0]),
        "urls": code.urls,
        "words": summed(lambda t, s: sum(1 for x in t if x.kind is TokenKind.WORD)),
        "sentences": summed(lambda t, s: len(prose_sentences(s))),
        "total_prompt_count": (len(conversation.turns)
                               if scope is Scope.CONVERSATION else 1),
        "misspellings": summed(lambda t, s: count_misspellings(t, lex)),
        "incomplete_sentences": summed(lambda t, s: count_incomplete_sentences(s)),
        "flesch": text.flesch,
        "smog": text.smog,
        "unresolved_references": summed(
            lambda t, s: count_unresolved_references(s, lex)),
        "entailment": text.entailment,
    }
    return FeatureVector(values={k: float(v) for k, v in values.items()},
                         flags=text.flags)


def feature_matrix(vectors: list[FeatureVector]) -> np.ndarray:
    return np.array([v.as_row() for v in vectors], dtype=float)


def compute_vif(matrix: np.ndarray, names: list[str] | None = None) -> dict[str, float]:
    """Variance inflation factor per column.

    VIF_j = 1/(1 - R^2_j) from least squares of column j on the other
    (centered) columns. Near-perfect fits report infinity; constant
    columns report NaN (pass-through with a warning upstream).
    """
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2:
        raise InputError("feature matrix must be 2-D")
    n, p = X.shape
    if names is None:
        names = list(CANONICAL_FEATURES[:p])
    if len(names) != p:
        raise ContractError("names must match matrix columns")
    if n < p + 2:
        raise InputError(f"need at least {p + 2} rows for VIF, got {n}")
    centered = X - X.mean(axis=0)
    out: dict[str, float] = {}
    for j in range(p):
        y = centered[:, j]
        sst = float(y @ y)
        if sst == 0.0:
            out[names[j]] = math.nan
            continue
        others = np.delete(centered, j, axis=1)
        coef, _, _, _ = np.linalg.lstsq(others, y, rcond=None)
        resid = y - others @ coef
        r2 = 1.0 - float(resid @ resid) / sst
        if r2 >= 1.0 - 1e-12:
            out[names[j]] = VIF_INFINITE
        else:
            out[names[j]] = 1.0 / (1.0 - r2)
    return out


def prune_by_vif(
    matrix: np.ndarray,
    names: list[str] | None = None,
    threshold: float = VIF_THRESHOLD,
) -> FeatureSelection:
    """Iteratively drop the worst collinear column until all VIF <= threshold.

    Ties (including several infinite VIFs) break by canonical name
    order. Constant columns are kept as pass-through.
    """
    X = np.asarray(matrix, dtype=float)
    if names is None:
        names = list(CANONICAL_FEATURES[:X.shape[1]])
    order = {name: i for i, name in enumerate(CANONICAL_FEATURES)}
    current = list(names)
    removed: list[str] = []
    while True:
        idx = [names.index(c) for c in current]
        vifs = compute_vif(X[:, idx], current)
        finite_bad = {k: v for k, v in vifs.items()
                      if not math.isnan(v) and v > threshold}
        if not finite_bad:
            return FeatureSelection(tuple(current), tuple(removed), vifs)
        worst_value = max(finite_bad.values())
        candidates = [k for k, v in finite_bad.items() if v == worst_value]
        victim = min(candidates, key=lambda k: order.get(k, len(order)))
        current.remove(victim)
        removed.append(victim)


def fit_robust_scaler(matrix: np.ndarray, names: list[str]) -> ScalerParams:
    """Median / IQR scaler with type-7 (linear interpolation) quantiles."""
    X = np.asarray(matrix, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InputError("robust scaler needs a 2-D matrix with >= 2 rows")
    if X.shape[1] != len(names):
        raise ContractError("names must match matrix columns")
    medians = np.percentile(X, 50, axis=0, method="linear")
    q1 = np.percentile(X, 25, axis=0, method="linear")
    q3 = np.percentile(X, 75, axis=0, method="linear")
    return ScalerParams(
        feature_names=tuple(names),
        medians=tuple(float(m) for m in medians),
        iqrs=tuple(float(v) for v in (q3 - q1)),
    )


def apply_robust_scaler(
    params: ScalerParams,
    values: dict[str, float] | FeatureVector,
) -> np.ndarray:
    """Scale one observation to (x - median)/IQR, pass-through on IQR 0."""
    mapping = values.values if isinstance(values, FeatureVector) else values
    missing = [n for n in params.feature_names if n not in mapping]
    if missing:
        raise ContractError(f"missing features for scaler: {missing}")
    out = np.empty(len(params.feature_names), dtype=float)
    for i, name in enumerate(params.feature_names):
        x = float(mapping[name])
        med, iqr = params.medians[i], params.iqrs[i]
        out[i] = (x - med) if iqr == 0.0 else (x - med) / iqr
    return out


def apply_robust_scaler_matrix(params: ScalerParams, matrix: np.ndarray) -> np.ndarray:
    X = np.asarray(matrix, dtype=float)
    if X.shape[1] != len(params.feature_names):
        raise ContractError("matrix width must match scaler features")
    med = np.array(params.medians)
    iqr = np.array(params.iqrs)
    denom = np.where(iqr == 0.0, 1.0, iqr)
    return (X - med) / denom


def scaler_to_doc(params: ScalerParams) -> dict:
    return {
        name: {"median": params.medians[i], "iqr": params.iqrs[i]}
        for i, name in enumerate(params.feature_names)
    }


def scaler_from_doc(doc: dict) -> ScalerParams:
    doc = {k: v for k, v in doc.items() if not k.startswith("_")}
    names = [n for n in CANONICAL_FEATURES if n in doc]
    extra = set(doc) - set(CANONICAL_FEATURES)
    if extra:
        raise ContractError(f"unknown features in scaler doc: {sorted(extra)}")
    return ScalerParams(
        feature_names=tuple(names),
        medians=tuple(float(doc[n]["median"]) for n in names),
        iqrs=tuple(float(doc[n]["iqr"]) for n in names),
    )


def write_feature_csv(
    vectors: list[FeatureVector],
    labels: list[IssueStatus],
) -> str:
    """Canonical header + issue_status label column."""
    if len(vectors) != len(labels):
        raise InputError("labels must align with vectors")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(list(CANONICAL_FEATURES) + [LABEL_COLUMN])
    for vec, label in zip(vectors, labels):
        writer.writerow([repr(v) for v in vec.as_row()] + [label.value])
    return buf.getvalue()


def read_feature_csv(text: str) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Returns (matrix, labels as 1=closed, feature names)."""
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise InputError("empty feature CSV")
    header = rows[0]
    if LABEL_COLUMN not in header:
        raise InputError(f"feature CSV missing {LABEL_COLUMN} column")
    label_idx = header.index(LABEL_COLUMN)
    names = [h for i, h in enumerate(header) if i != label_idx]
    unknown = set(names) - set(CANONICAL_FEATURES)
    if unknown:
        raise InputError(f"unknown feature columns: {sorted(unknown)}")
    data = []
    labels = []
    for row in rows[1:]:
        if not row:
            continue
        status = row[label_idx].strip().lower()
        if status not in ("open", "closed"):
            raise InputError(f"bad {LABEL_COLUMN} value: {row[label_idx]!r}")
        labels.append(1.0 if status == "closed" else 0.0)
        data.append([float(v) for i, v in enumerate(row) if i != label_idx])
    return np.array(data, dtype=float), np.array(labels, dtype=float), names
