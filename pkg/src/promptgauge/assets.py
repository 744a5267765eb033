"""Asset loading: lexicons, error patterns, model, calibration, scaler.

Assets live in the packaged ``assets/`` directory by default; the
``PROMPTGAUGE_ASSETS`` environment variable (or an explicit path)
points at an alternative directory with the same layout:

    lexicons/{dictionary,se_terms,subordinators,constraints,pronouns,
              pos_nouns,pos_verbs,pos_modifiers,abbrev,stopwords}.txt
    patterns/errors.txt
    model.json
    calibration.json
    scaler.json

Lexicon files are UTF-8, lowercase, one entry per line, ``#`` comments.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AssetError

ENV_ASSETS = "PROMPTGAUGE_ASSETS"

_VOWELS = "aeiou"

LEXICON_FILES = (
    "dictionary",
    "se_terms",
    "subordinators",
    "constraints",
    "pronouns",
    "pos_nouns",
    "pos_verbs",
    "pos_modifiers",
    "abbrev",
    "stopwords",
)


def default_asset_dir() -> Path:
    return Path(__file__).resolve().parent / "assets"


def resolve_asset_dir(path: str | Path | None = None) -> Path:
    """Explicit path beats the environment variable beats the bundle."""
    if path is not None:
        return Path(path)
    env = os.environ.get(ENV_ASSETS)
    if env:
        return Path(env)
    return default_asset_dir()


def read_lexicon_file(path: Path) -> list[str]:
    if not path.is_file():
        raise AssetError(f"missing lexicon file: {path}")
    entries = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        entries.append(line.lower())
    return entries


def _plural_variants(stem: str) -> set[str]:
    out = {stem}
    if stem.endswith(("s", "x", "z", "ch", "sh")):
        out.add(stem + "es")
    elif stem.endswith("y") and len(stem) > 2 and stem[-2] not in _VOWELS:
        out.add(stem[:-1] + "ies")
    else:
        out.add(stem + "s")
    return out


def _verb_variants(stem: str) -> set[str]:
    out = {stem}
    if stem.endswith(("s", "x", "z", "ch", "sh", "o")):
        out.add(stem + "es")
    elif stem.endswith("y") and len(stem) > 2 and stem[-2] not in _VOWELS:
        out.add(stem[:-1] + "ies")
        out.add(stem[:-1] + "ied")
        out.add(stem + "ing")
        return out
    else:
        out.add(stem + "s")
    if stem.endswith("e") and not stem.endswith("ee"):
        out.add(stem + "d")
        out.add(stem[:-1] + "ing")
    else:
        out.add(stem + "ed")
        out.add(stem + "ing")
        if (len(stem) >= 3 and stem[-1] in "bdglmnprt"
                and stem[-2] in _VOWELS and stem[-3] not in _VOWELS
                and not stem.endswith(("en", "er", "on", "ow"))):
            out.add(stem + stem[-1] + "ed")
            out.add(stem + stem[-1] + "ing")
    return out


@dataclass(frozen=True)
class Lexicons:
    """Read-only bundle of every word list the metrics need."""

    dictionary: frozenset[str]
    se_terms: frozenset[str]          # unigrams and space-joined bigrams
    subordinators: frozenset[str]
    constraints: frozenset[str]
    pronouns: frozenset[str]
    nouns: frozenset[str]             # includes derived plurals
    verbs: frozenset[str]             # includes derived inflections
    modifiers: frozenset[str]
    abbreviations: frozenset[str]
    stopwords: frozenset[str]

    @classmethod
    def load(cls, asset_dir: str | Path | None = None) -> "Lexicons":
        base = resolve_asset_dir(asset_dir) / "lexicons"
        raw = {name: read_lexicon_file(base / f"{name}.txt")
               for name in LEXICON_FILES}
        if not raw["dictionary"]:
            raise AssetError("dictionary lexicon is empty")
        if not raw["se_terms"]:
            raise AssetError("software-term lexicon is empty")
        nouns: set[str] = set()
        for stem in raw["pos_nouns"]:
            nouns |= _plural_variants(stem)
        verbs: set[str] = set()
        for stem in raw["pos_verbs"]:
            verbs |= _verb_variants(stem)
        return cls(
            dictionary=frozenset(raw["dictionary"]),
            se_terms=frozenset(raw["se_terms"]),
            subordinators=frozenset(raw["subordinators"]),
            constraints=frozenset(raw["constraints"]),
            pronouns=frozenset(raw["pronouns"]),
            nouns=frozenset(nouns),
            verbs=frozenset(verbs),
            modifiers=frozenset(raw["pos_modifiers"]),
            abbreviations=frozenset(raw["abbrev"]),
            stopwords=frozenset(raw["stopwords"]),
        )


@dataclass(frozen=True)
class ErrorPattern:
    pattern_id: str
    regex: re.Pattern


def load_error_patterns(asset_dir: str | Path | None = None) -> tuple[ErrorPattern, ...]:
    path = resolve_asset_dir(asset_dir) / "patterns" / "errors.txt"
    if not path.is_file():
        raise AssetError(f"missing error-pattern file: {path}")
    patterns = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" in line:
            pattern_id, _, expr = line.partition("\t")
        else:
            pattern_id, expr = f"rule_{lineno}", line
        try:
            patterns.append(ErrorPattern(pattern_id.strip(), re.compile(expr)))
        except re.error as exc:
            raise AssetError(f"bad regex in {path} line {lineno}: {exc}") from exc
    if not patterns:
        raise AssetError(f"error-pattern file has no rules: {path}")
    return tuple(patterns)


def load_json_asset(name: str, asset_dir: str | Path | None = None) -> dict:
    path = resolve_asset_dir(asset_dir) / name
    if not path.is_file():
        raise AssetError(f"missing asset: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AssetError(f"malformed JSON asset {path}: {exc}") from exc


def _iter_asset_files(base: Path):
    for p in sorted(base.rglob("*")):
        if p.is_file() and p.suffix in (".txt", ".json"):
            yield p


def asset_fingerprint(asset_dir: str | Path | None = None) -> str:
    """Stable hash of every asset file; same bytes, same fingerprint."""
    base = resolve_asset_dir(asset_dir)
    digest = hashlib.sha256()
    for p in _iter_asset_files(base):
        digest.update(p.relative_to(base).as_posix().encode())
        digest.update(b"\0")
        digest.update(p.read_bytes())
    return digest.hexdigest()[:16]


def model_fingerprint(asset_dir: str | Path | None = None) -> str:
    path = resolve_asset_dir(asset_dir) / "model.json"
    if not path.is_file():
        return "missing"
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


@dataclass(frozen=True)
class AssetBundle:
    """Everything the analyzer needs, loaded once and shared read-only."""

    directory: Path
    lexicons: Lexicons
    error_patterns: tuple[ErrorPattern, ...]
    model_doc: dict = field(repr=False)
    calibration_doc: dict = field(repr=False)
    scaler_doc: dict = field(repr=False)

    @classmethod
    def load(cls, asset_dir: str | Path | None = None) -> "AssetBundle":
        base = resolve_asset_dir(asset_dir)
        return cls(
            directory=base,
            lexicons=Lexicons.load(base),
            error_patterns=load_error_patterns(base),
            model_doc=load_json_asset("model.json", base),
            calibration_doc=load_json_asset("calibration.json", base),
            scaler_doc=load_json_asset("scaler.json", base),
        )

    def fingerprints(self) -> dict[str, str]:
        return {
            "model": model_fingerprint(self.directory),
            "assets": asset_fingerprint(self.directory),
        }
