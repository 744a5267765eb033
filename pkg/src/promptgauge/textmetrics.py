"""Prose-side metrics over segmented prompt text.

Every operation is a pure function of its inputs plus read-only
lexicons, so results are reproducible bit-for-bit. Counts are taken
over tokens produced by :mod:`promptgauge.tokens`; rate metrics
(readability, entailment, lexical density) run over sentences that
contain at least one word token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .assets import Lexicons
from .errors import AssetError, InputError
from .tokens import Token, TokenKind, count_syllables, looks_like_identifier, tokenize

FLESCH_MIN = -400.0
FLESCH_MAX = 121.22

# third-person pronouns checked for a visible antecedent
AMBIGUOUS_PRONOUNS = frozenset(
    ["it", "this", "that", "these", "those", "they", "them", "its", "their"]
)

# frequent -ly words that are not adverbs
_LY_EXCEPTIONS = frozenset(
    ["reply", "supply", "apply", "imply", "multiply", "comply", "family",
     "assembly", "anomaly", "butterfly", "firefly", "belly", "bully",
     "jelly", "rally", "tally", "ally", "early"]
)

_ABBREV_TAIL_RE = re.compile(r"[A-Za-z][A-Za-z.]*\.$")


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[Token, ...]
    has_subject: bool
    has_main_verb: bool

    @property
    def word_tokens(self) -> list[Token]:
        return [t for t in self.tokens if t.kind is TokenKind.WORD]


@dataclass(frozen=True)
class TextMetrics:
    software_terms: int
    named_entities: int
    constraints: int
    modifiers: int
    subordinate_clauses: int
    repeated_2grams: int
    repeated_3grams: int
    unique_words: int
    unique_info: float
    words: int
    sentences: int
    misspellings: int
    incomplete_sentences: int
    flesch: float
    smog: float
    unresolved_references: int
    entailment: float
    flags: frozenset[str] = field(default_factory=frozenset)


def _is_verb(normalized: str, lex: Lexicons) -> bool:
    return normalized in lex.verbs


def _is_noun_like(normalized: str, lex: Lexicons) -> bool:
    return normalized in lex.nouns or normalized in lex.pronouns


def _sentence_features(text: str, lex: Lexicons) -> Sentence:
    toks = tuple(tokenize(text))
    words = [t for t in toks if t.kind is TokenKind.WORD]
    has_verb = any(_is_verb(t.normalized, lex) for t in words)
    has_subject = False
    # noun-likeness wins over verb-likeness for ambiguous tokens
    # ("the build fails" has a subject even though build is also a verb)
    for t in words:
        if _is_noun_like(t.normalized, lex):
            has_subject = True
            break
        if _is_verb(t.normalized, lex):
            break
    # imperative guard: leading verb implies an implicit subject
    if words and _is_verb(words[0].normalized, lex):
        has_subject = True
    return Sentence(text, toks, has_subject, has_verb)


def split_sentences(prose: str, lex: Lexicons) -> list[Sentence]:
    """Split prose into sentences.

    Boundaries: ``.!?`` followed by whitespace and a capital (or end of
    text), and newlines that end a non-empty line. The abbreviation
    guard list suppresses splits after entries like "e.g.".
    """
    if not prose:
        return []
    boundaries = []
    n = len(prose)
    line_start = 0
    for i, ch in enumerate(prose):
        if ch == "\n":
            if prose[line_start:i].strip():
                boundaries.append(i + 1)
            line_start = i + 1
            continue
        if ch not in ".!?":
            continue
        if ch == ".":
            window = prose[max(0, i - 15): i + 1]
            tail = _ABBREV_TAIL_RE.search(window)
            if tail and tail.group(0).lower() in lex.abbreviations:
                continue
        j = i + 1
        while j < n and prose[j] in "\"')]}":
            j += 1
        if j >= n:
            boundaries.append(n)
            continue
        if prose[j].isspace():
            k = j
            while k < n and prose[k].isspace() and prose[k] != "\n":
                k += 1
            if k >= n or prose[k].isupper() or prose[k] == "\n":
                boundaries.append(j)
    boundaries.append(n)
    sentences = []
    start = 0
    for b in sorted(set(boundaries)):
        chunk = prose[start:b]
        if chunk.strip():
            sentences.append(_sentence_features(chunk.strip(), lex))
        start = b
    return sentences


def prose_sentences(sentences: list[Sentence]) -> list[Sentence]:
    """Sentences that carry at least one word token."""
    return [s for s in sentences if any(t.kind is TokenKind.WORD for t in s.tokens)]


def count_software_terms(tokens: list[Token], lexicon: frozenset[str]) -> int:
    """Occurrences (not distinct terms) of lexicon entries.

    Case-insensitive; multiword entries match greedily left-to-right
    without overlap.
    """
    if not lexicon:
        raise AssetError("software-term lexicon is empty")
    stream = [t.normalized for t in tokens if t.kind is not TokenKind.PUNCTUATION]
    count = 0
    i = 0
    while i < len(stream):
        if i + 1 < len(stream) and f"{stream[i]} {stream[i + 1]}" in lexicon:
            count += 1
            i += 2
            continue
        if stream[i] in lexicon:
            count += 1
        i += 1
    return count


def _entity_spans(sentence: Sentence) -> list[tuple[int, int]]:
    """Spans of contiguous name-like tokens within one sentence.

    Span indices address sentence.tokens. Punctuation breaks
    contiguity, and the bare pronoun "I" never qualifies.
    """
    qualifies = [False] * len(sentence.tokens)
    wn_seen = 0
    for i, t in enumerate(sentence.tokens):
        if t.kind is TokenKind.NUMBER:
            qualifies[i] = "." in t.surface
            wn_seen += 1
        elif t.kind is TokenKind.WORD:
            s = t.surface
            capitalized = s[0].isupper() and wn_seen > 0 and s != "I"
            internal_cap = any(c.isupper() for c in s[1:])
            qualifies[i] = capitalized or internal_cap
            wn_seen += 1
    spans = []
    i = 0
    while i < len(qualifies):
        if qualifies[i]:
            j = i
            while j + 1 < len(qualifies) and qualifies[j + 1]:
                j += 1
            spans.append((i, j))
            i = j + 1
        else:
            i += 1
    return spans


def count_named_entities(sentences: list[Sentence]) -> int:
    """Heuristic named-entity count.

    A token qualifies when it is capitalized off sentence-start, has an
    internal capital (CamelCase, ALLCAPS), or looks like a version
    number; contiguous qualifying tokens merge into one entity.
    """
    return sum(len(_entity_spans(s)) for s in sentences)


def _sentence_noun_like_positions(sentence: Sentence, lex: Lexicons) -> list[bool]:
    """Per-token noun-likeness: noun lexicon, entity span, or code token."""
    flags = [False] * len(sentence.tokens)
    for a, b in _entity_spans(sentence):
        for k in range(a, b + 1):
            flags[k] = True
    for i, t in enumerate(sentence.tokens):
        if t.kind is TokenKind.CODE:
            flags[i] = True
        elif t.kind is TokenKind.WORD and t.normalized in lex.nouns:
            flags[i] = True
    return flags


def count_conditional_phrasing(sentences: list[Sentence], lex: Lexicons) -> tuple[int, int, int]:
    """(constraints, modifiers, subordinate_clauses)."""
    constraints = 0
    modifiers = 0
    subordinate = 0
    for sent in sentences:
        stream = [t for t in sent.tokens if t.kind is not TokenKind.PUNCTUATION]
        norm = [t.normalized for t in stream]
        # constraint markers, greedy bigram-first matching
        i = 0
        while i < len(norm):
            if i + 1 < len(norm) and f"{norm[i]} {norm[i + 1]}" in lex.constraints:
                constraints += 1
                i += 2
                continue
            if norm[i] in lex.constraints:
                constraints += 1
            i += 1
        # modifiers: lexicon hits plus the -ly suffix rule
        for t in sent.tokens:
            if t.kind is not TokenKind.WORD:
                continue
            w = t.normalized
            if w in lex.modifiers:
                modifiers += 1
            elif (w.endswith("ly") and len(w) >= 5 and "_" not in w
                  and "." not in w and w not in _LY_EXCEPTIONS):
                modifiers += 1
        # subordinators that open a clause: sentence-initial or after a comma
        positions = {}  # index in stream -> token index in sentence
        stream_idx = [i for i, t in enumerate(sent.tokens)
                      if t.kind is not TokenKind.PUNCTUATION]
        i = 0
        while i < len(norm):
            matched = None
            if i + 1 < len(norm) and f"{norm[i]} {norm[i + 1]}" in lex.subordinators:
                matched = 2
            elif norm[i] in lex.subordinators:
                matched = 1
            if matched:
                tok_pos = stream_idx[i]
                if tok_pos == 0:
                    subordinate += 1
                else:
                    prev = sent.tokens[tok_pos - 1]
                    if prev.kind is TokenKind.PUNCTUATION and prev.surface == ",":
                        subordinate += 1
                i += matched
            else:
                i += 1
    return constraints, modifiers, subordinate


def _ngram_counts(tokens: list[Token], n: int) -> dict[tuple[str, ...], int]:
    stream = [t.normalized for t in tokens if t.kind is not TokenKind.PUNCTUATION]
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(stream) - n + 1):
        gram = tuple(stream[i:i + n])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def count_repeated_ngrams(tokens: list[Token], n: int) -> int:
    """Distinct normalized n-grams occurring at least twice."""
    if n not in (2, 3):
        raise InputError(f"n must be 2 or 3, got {n}")
    return sum(1 for c in _ngram_counts(tokens, n).values() if c >= 2)


def lexical_density(tokens: list[Token]) -> tuple[int, float]:
    """(unique_words, unique_info) over word tokens."""
    words = [t.normalized for t in tokens if t.kind is TokenKind.WORD]
    unique = len(set(words))
    return unique, unique / max(1, len(words))


def count_misspellings(tokens: list[Token], lex: Lexicons) -> int:
    """Word tokens absent from the dictionary.

    Code tokens, numbers, identifier-shaped tokens (camelCase,
    snake_case, dotted paths) and software-term hits are exempt.
    """
    if not lex.dictionary:
        raise AssetError("dictionary lexicon is empty")
    count = 0
    for t in tokens:
        if t.kind is not TokenKind.WORD:
            continue
        if looks_like_identifier(t.surface):
            continue
        if t.normalized in lex.se_terms:
            continue
        if t.normalized not in lex.dictionary:
            count += 1
    return count


def count_incomplete_sentences(sentences: list[Sentence]) -> int:
    """Sentences lacking a detected subject or any verb."""
    count = 0
    for s in sentences:
        if not any(t.kind is TokenKind.WORD for t in s.tokens):
            continue
        if not s.has_main_verb or not s.has_subject:
            count += 1
    return count


def flesch_reading_ease(sentences: list[Sentence]) -> tuple[float, bool]:
    """(score, no_prose_flag); score clamped to the documented guard range."""
    prose = prose_sentences(sentences)
    words = [t for s in prose for t in s.word_tokens]
    if not words:
        return 0.0, True
    syllables = sum(count_syllables(t.surface) for t in words)
    score = 206.835 - 1.015 * (len(words) / len(prose)) - 84.6 * (syllables / len(words))
    return min(max(score, FLESCH_MIN), FLESCH_MAX), False


def smog_grade(sentences: list[Sentence]) -> tuple[float, bool]:
    """(grade, few_sentences_flag).

    Computed for any sentence count; the flag marks inputs below the
    classical 30-sentence minimum. Zero sentences give (0.0, True).
    """
    prose = prose_sentences(sentences)
    if not prose:
        return 0.0, True
    poly = sum(1 for s in prose for t in s.word_tokens
               if count_syllables(t.surface) >= 3)
    grade = 1.0430 * math.sqrt(poly * (30 / len(prose))) + 3.1291
    return grade, len(prose) < 30


def count_unresolved_references(sentences: list[Sentence], lex: Lexicons) -> int:
    """Third-person pronouns with no antecedent candidate in scope.

    A pronoun resolves against any noun-like token (noun lexicon hit,
    entity-span member, code token) earlier in its own sentence or
    anywhere in the previous sentence.
    """
    count = 0
    prev_has_noun_like = False
    for s in sentences:
        noun_like = _sentence_noun_like_positions(s, lex)
        for i, t in enumerate(s.tokens):
            if t.kind is not TokenKind.WORD:
                continue
            if t.normalized not in AMBIGUOUS_PRONOUNS:
                continue
            if prev_has_noun_like or any(noun_like[:i]):
                continue
            count += 1
        prev_has_noun_like = any(noun_like)
    return count


class LexicalOverlapScorer:
    """Bundled entailment proxy: content-word cohesion of sentence pairs.

    Scores a pair as min(1, 2 * Jaccard(content words)). Two sentences
    with no content words at all count as fully cohesive.
    """

    def __init__(self, stopwords: frozenset[str]):
        self.stopwords = stopwords

    def _content(self, sentence: Sentence) -> frozenset[str]:
        return frozenset(
            t.normalized for t in sentence.tokens
            if t.kind is TokenKind.WORD and t.normalized not in self.stopwords
        )

    def score_pair(self, premise: Sentence, hypothesis: Sentence) -> float:
        a, b = self._content(premise), self._content(hypothesis)
        if not a and not b:
            return 1.0
        union = len(a | b)
        overlap = len(a & b) / union
        return min(1.0, 2.0 * overlap)


class RemoteEntailmentScorer:
    """Adapter for an external premise/hypothesis inference service.

    POSTs {"premise": ..., "hypothesis": ...} and expects a JSON body
    with an "entailment" probability. Any transport or schema failure
    raises, letting the caller fall back to the bundled proxy.
    """

    def __init__(self, url: str, timeout: float = 5.0):
        self.url = url
        self.timeout = timeout

    def score_pair(self, premise: Sentence, hypothesis: Sentence) -> float:
        import json
        import urllib.request

        payload = json.dumps(
            {"premise": premise.text, "hypothesis": hypothesis.text}
        ).encode("utf-8")
        req = urllib.request.Request(
            self.url, data=payload, headers={"Content-Type": "application/json"}
        )
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            doc = json.loads(resp.read().decode("utf-8"))
        value = float(doc["entailment"])
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"entailment out of range: {value}")
        return value


def entailment_score(sentences: list[Sentence], scorer, fallback=None) -> tuple[float, bool]:
    """(mean pairwise score, degraded_flag).

    Fewer than two prose sentences give the neutral 0.5. If the primary
    scorer raises and a fallback is supplied, the fallback is used and
    the degraded flag set.
    """
    prose = prose_sentences(sentences)
    if len(prose) < 2:
        return 0.5, False
    degraded = False
    scores = []
    for a, b in zip(prose, prose[1:]):
        try:
            scores.append(float(scorer.score_pair(a, b)))
        except Exception:
            if fallback is None:
                raise
            degraded = True
            scores.append(float(fallback.score_pair(a, b)))
    return sum(scores) / len(scores), degraded


def compute_text_metrics(prose: str, lex: Lexicons, scorer=None) -> TextMetrics:
    """All prose metrics for one segmented prose string."""
    tokens = tokenize(prose)
    sentences = split_sentences(prose, lex)
    return text_metrics_from_parts(tokens, sentences, lex, scorer)


def text_metrics_from_parts(
    tokens: list[Token],
    sentences: list[Sentence],
    lex: Lexicons,
    scorer=None,
) -> TextMetrics:
    proxy = LexicalOverlapScorer(lex.stopwords)
    primary = scorer if scorer is not None else proxy
    fallback = proxy if scorer is not None else None

    constraints, modifiers, subordinate = count_conditional_phrasing(sentences, lex)
    unique_words, unique_info = lexical_density(tokens)
    flesch, no_prose = flesch_reading_ease(sentences)
    smog, few_sentences = smog_grade(sentences)
    entailment, degraded = entailment_score(sentences, primary, fallback)

    flags = set()
    if no_prose:
        flags.add("no_prose")
    if few_sentences:
        flags.add("smog_few_sentences")
    if degraded:
        flags.add("entailment_degraded")

    return TextMetrics(
        software_terms=count_software_terms(tokens, lex.se_terms),
        named_entities=count_named_entities(sentences),
        constraints=constraints,
        modifiers=modifiers,
        subordinate_clauses=subordinate,
        repeated_2grams=count_repeated_ngrams(tokens, 2),
        repeated_3grams=count_repeated_ngrams(tokens, 3),
        unique_words=unique_words,
        unique_info=unique_info,
        words=sum(1 for t in tokens if t.kind is TokenKind.WORD),
        sentences=len(prose_sentences(sentences)),
        misspellings=count_misspellings(tokens, lex),
        incomplete_sentences=count_incomplete_sentences(sentences),
        flesch=flesch,
        smog=smog,
        unresolved_references=count_unresolved_references(sentences, lex),
        entailment=entailment,
        flags=frozenset(flags),
    )
