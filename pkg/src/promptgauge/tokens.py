"""Deterministic tokenization of prompt prose.

Operates on prose in which code and error segments have already been
replaced by [CODE]/[ERROR] placeholders (see codemetrics). Placeholders
and URLs become single CodeToken entries; contractions stay whole;
dotted identifiers (os.path) stay whole.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import InputError


class TokenKind(Enum):
    WORD = "word"
    NUMBER = "number"
    PUNCTUATION = "punctuation"
    CODE = "code"


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    kind: TokenKind

    @property
    def is_word(self) -> bool:
        return self.kind is TokenKind.WORD


_TOKEN_RE = re.compile(
    r"""(?P<placeholder>\[(?:CODE|ERROR)\])
      | (?P<url>https?://[^\s<>"'\)\]\}]+)
      | (?P<dotted>[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)+)
      | (?P<version>\d+(?:\.\d+)+)
      | (?P<word>[A-Za-z_][A-Za-z0-9_]*(?:'[A-Za-z]+)?)
      | (?P<number>\d+)
      | (?P<punct>\S)
    """,
    re.VERBOSE,
)

VERSION_RE = re.compile(r"\d+(?:\.\d+)+$")
URL_RE = re.compile(r"https?://[^\s<>\"'\)\]\}]+")

# identifier shapes exempt from spell checking
_CAMEL_RE = re.compile(r"[a-z0-9]+[A-Z]|[A-Z]{2,}")
_SNAKE_OR_DOTTED_RE = re.compile(r"[A-Za-z0-9]+[._][A-Za-z0-9._]*")


def tokenize(prose: str) -> list[Token]:
    """Split prose into tokens. Empty input gives an empty list."""
    tokens: list[Token] = []
    for m in _TOKEN_RE.finditer(prose):
        surface = m.group(0)
        kind = m.lastgroup
        if kind in ("placeholder", "url"):
            tokens.append(Token(surface, surface.lower(), TokenKind.CODE))
        elif kind == "version":
            tokens.append(Token(surface, surface, TokenKind.NUMBER))
        elif kind == "number":
            tokens.append(Token(surface, surface, TokenKind.NUMBER))
        elif kind in ("word", "dotted"):
            if any(c.isalpha() for c in surface):
                tokens.append(Token(surface, surface.lower(), TokenKind.WORD))
            else:
                tokens.append(Token(surface, surface, TokenKind.CODE))
        else:
            tokens.append(Token(surface, surface, TokenKind.PUNCTUATION))
    return tokens


def looks_like_identifier(surface: str) -> bool:
    """camelCase, UPPER_CASE, snake_case or dotted path."""
    return bool(_CAMEL_RE.search(surface) or _SNAKE_OR_DOTTED_RE.fullmatch(surface))


def count_syllables(word: str) -> int:
    """Vowel-group syllable estimate, minimum 1.

    Counts maximal runs of a/e/i/o/u/y and subtracts one for a trailing
    silent 'e' unless that would reach zero.
    """
    if not any(c.isalpha() for c in word):
        raise InputError(f"syllable count needs an alphabetic word: {word!r}")
    w = word.lower()
    groups = re.findall(r"[aeiouy]+", w)
    count = len(groups)
    if w.endswith("e") and count > 1:
        count -= 1
    return max(count, 1)


def match_phrases(tokens: list[Token], phrases: frozenset[str]) -> int:
    """Count phrase occurrences over the normalized token stream.

    Phrase entries are single words or space-joined bigrams. Bigrams are
    matched greedily left-to-right without overlap; matching is over
    normalized (lowercase) forms of non-punctuation tokens.
    """
    stream = [t.normalized for t in tokens if t.kind is not TokenKind.PUNCTUATION]
    count = 0
    i = 0
    while i < len(stream):
        if i + 1 < len(stream) and f"{stream[i]} {stream[i + 1]}" in phrases:
            count += 1
            i += 2
            continue
        if stream[i] in phrases:
            count += 1
        i += 1
    return count
