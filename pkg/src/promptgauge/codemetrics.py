"""Prompt segmentation into prose, code snippets, error messages, URLs.

Segmentation is line-based and lossless: every extracted block is
replaced in the prose by a [CODE] or [ERROR] placeholder, and
:func:`reassemble` restores the original prompt byte-for-byte.

Claim precedence per line: fenced block > error run > unfenced code
run. A fenced block whose content is dominated by error-pattern lines
(or contains a traceback header) is classified as an error message
rather than code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .assets import ErrorPattern
from .textmetrics import Sentence
from .tokens import URL_RE, TokenKind

CODE_TAG = "[CODE]"
ERROR_TAG = "[ERROR]"

_IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*")
_CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")

# sub-identifier noise filter: reserved words and trivial fragments
_CODE_KEYWORDS = frozenset(
    ["if", "else", "elif", "for", "while", "return", "def", "class", "import",
     "from", "try", "except", "finally", "with", "pass", "break", "continue",
     "lambda", "yield", "raise", "assert", "del", "global", "nonlocal", "not",
     "and", "or", "in", "is", "none", "true", "false", "var", "let", "const",
     "function", "new", "this", "typeof", "void", "int", "float", "char",
     "double", "long", "short", "signed", "unsigned", "struct", "enum",
     "static", "public", "private", "protected", "null", "the"]
)

MIN_UNFENCED_RUN = 2
MIN_INDENT_COLUMNS = 4
SYMBOL_DENSITY_THRESHOLD = 0.15


@dataclass(frozen=True)
class CodeSnippet:
    text: str                      # inner code, fences excluded
    raw: str = ""                  # exact replaced span, for reassembly
    fenced: bool = True

    @property
    def size_chars(self) -> int:
        return len(self.text)

    @property
    def identifiers(self) -> frozenset[str]:
        return split_identifiers(self.text)


@dataclass(frozen=True)
class ErrorMessage:
    text: str
    pattern_id: str
    raw: str = ""


@dataclass(frozen=True)
class Placement:
    offset: int                    # placeholder offset within prose
    tag: str                       # CODE_TAG or ERROR_TAG
    raw: str                       # original bytes the placeholder replaced


@dataclass(frozen=True)
class PromptSegments:
    prose: str
    snippets: tuple[CodeSnippet, ...]
    errors: tuple[ErrorMessage, ...]
    urls: tuple[str, ...]
    placements: tuple[Placement, ...] = field(default=(), repr=False)
    unterminated_fence: bool = False


@dataclass(frozen=True)
class CodeMetrics:
    code_snippets: int
    error_messages: int
    urls: int
    code_descriptions: int
    mean_snippet_size: float


def split_identifiers(code_text: str) -> frozenset[str]:
    """Identifier set of a snippet.

    Full identifiers plus camelCase / snake_case / dotted sub-splits;
    fragments of length <= 2 and reserved words are dropped.
    """
    out: set[str] = set()
    for m in _IDENTIFIER_RE.finditer(code_text):
        full = m.group(0)
        parts = {full}
        for dotted in full.split("."):
            parts.add(dotted)
            for snake in dotted.split("_"):
                parts.add(snake)
                parts.update(_CAMEL_SPLIT_RE.split(snake))
        for p in parts:
            if len(p) > 2 and p.lower() not in _CODE_KEYWORDS:
                out.add(p)
    return frozenset(out)


@dataclass
class _Block:
    kind: str                      # "code" | "error"
    first: int                     # first line index
    last: int                      # last line index (inclusive)
    text: str = ""                 # snippet/error payload
    rule: str = ""                 # error pattern id
    fenced: bool = False


def _line_spans(text: str) -> list[tuple[int, int, int]]:
    """(start, content_end, line_end) per line; line_end includes '\\n'."""
    spans = []
    pos = 0
    n = len(text)
    while pos < n:
        nl = text.find("\n", pos)
        if nl == -1:
            spans.append((pos, n, n))
            break
        spans.append((pos, nl, nl + 1))
        pos = nl + 1
    return spans


def _is_fence_line(content: str) -> bool:
    return content.lstrip().startswith("```")


def _match_error_line(content: str, patterns: tuple[ErrorPattern, ...]) -> str | None:
    for p in patterns:
        if p.regex.search(content):
            return p.pattern_id
    return None


def _code_signal(content: str) -> bool:
    stripped = content.strip()
    if not stripped:
        return False
    if stripped.endswith((";", "{", "}")):
        return True
    if "=" in stripped and not stripped.endswith("."):
        return True
    indent = 0
    for ch in content:
        if ch == " ":
            indent += 1
        elif ch == "\t":
            indent += MIN_INDENT_COLUMNS
        else:
            break
    if indent >= MIN_INDENT_COLUMNS:
        symbols = sum(1 for c in stripped if not c.isalnum() and not c.isspace())
        if symbols / len(stripped) > SYMBOL_DENSITY_THRESHOLD:
            return True
    return False


def extract_segments(prompt_raw: str, patterns: tuple[ErrorPattern, ...]) -> PromptSegments:
    """Segment one raw prompt. See module docstring for the rules."""
    spans = _line_spans(prompt_raw)
    n = len(spans)
    contents = [prompt_raw[s:e] for s, e, _ in spans]
    claimed = [False] * n
    blocks: list[_Block] = []
    unterminated = False

    # pass 1: fenced blocks
    i = 0
    while i < n:
        if not _is_fence_line(contents[i]):
            i += 1
            continue
        j = i + 1
        while j < n and not _is_fence_line(contents[j]):
            j += 1
        terminated = j < n
        last = j if terminated else n - 1
        if terminated:
            inner_lines = list(range(i + 1, j))
        else:
            unterminated = True
            inner_lines = list(range(i + 1, n))
        if inner_lines:
            inner = prompt_raw[spans[inner_lines[0]][0]:spans[inner_lines[-1]][1]]
        else:
            inner = ""
        nonblank = [contents[k] for k in inner_lines if contents[k].strip()]
        hits = [_match_error_line(c, patterns) for c in nonblank]
        matched = [h for h in hits if h is not None]
        is_error = bool(nonblank) and (
            "traceback" in matched or len(matched) * 2 > len(nonblank)
        )
        blocks.append(_Block(
            kind="error" if is_error else "code",
            first=i, last=last, text=inner,
            rule=matched[0] if is_error else "",
            fenced=True,
        ))
        for k in range(i, last + 1):
            claimed[k] = True
        i = last + 1

    # pass 2: error runs over unclaimed lines; indented lines extend a
    # run so traceback context lines stay inside one message
    run: list[int] = []
    run_rule = ""

    def close_run():
        nonlocal run, run_rule
        if run:
            text = "\n".join(contents[k] for k in run)
            blocks.append(_Block(kind="error", first=run[0], last=run[-1],
                                 text=text, rule=run_rule))
            for k in run:
                claimed[k] = True
        run, run_rule = [], ""

    for i in range(n):
        if claimed[i]:
            close_run()
            continue
        rule = _match_error_line(contents[i], patterns)
        if rule is not None:
            if not run:
                run_rule = rule
            run.append(i)
        elif run and contents[i].strip() and contents[i][:1] in (" ", "\t"):
            run.append(i)
        else:
            close_run()
    close_run()

    # pass 3: unfenced code runs of >= MIN_UNFENCED_RUN signal lines
    i = 0
    while i < n:
        if claimed[i] or not _code_signal(contents[i]):
            i += 1
            continue
        j = i
        while j + 1 < n and not claimed[j + 1] and _code_signal(contents[j + 1]):
            j += 1
        if j - i + 1 >= MIN_UNFENCED_RUN:
            text = "\n".join(contents[k] for k in range(i, j + 1))
            blocks.append(_Block(kind="code", first=i, last=j, text=text))
            for k in range(i, j + 1):
                claimed[k] = True
        i = j + 1

    blocks.sort(key=lambda b: b.first)

    # assemble prose with placeholders at block positions
    prose_parts: list[str] = []
    placements: list[Placement] = []
    snippets: list[CodeSnippet] = []
    errors: list[ErrorMessage] = []
    prose_len = 0
    block_at = {b.first: b for b in blocks}

    i = 0
    while i < n:
        b = block_at.get(i)
        if b is None:
            start, _, line_end = spans[i]
            prose_parts.append(prompt_raw[start:line_end])
            prose_len += line_end - start
            i += 1
            continue
        start = spans[b.first][0]
        content_end = spans[b.last][1]
        line_end = spans[b.last][2]
        raw = prompt_raw[start:content_end]
        if b.kind == "error":
            errors.append(ErrorMessage(text=b.text, pattern_id=b.rule, raw=raw))
            tag = ERROR_TAG
        else:
            snippets.append(CodeSnippet(text=b.text, raw=raw, fenced=b.fenced))
            tag = CODE_TAG
        placements.append(Placement(offset=prose_len, tag=tag, raw=raw))
        prose_parts.append(tag)
        prose_len += len(tag)
        trailer = prompt_raw[content_end:line_end]
        prose_parts.append(trailer)
        prose_len += len(trailer)
        i = b.last + 1

    return PromptSegments(
        prose="".join(prose_parts),
        snippets=tuple(snippets),
        errors=tuple(errors),
        urls=tuple(URL_RE.findall(prompt_raw)),
        placements=tuple(placements),
        unterminated_fence=unterminated,
    )


def reassemble(segments: PromptSegments) -> str:
    """Inverse of extract_segments; exact byte reconstruction."""
    out = []
    pos = 0
    for p in segments.placements:
        out.append(segments.prose[pos:p.offset])
        out.append(p.raw)
        pos = p.offset + len(p.tag)
    out.append(segments.prose[pos:])
    return "".join(out)


def snippet_stats(segments: PromptSegments | list[PromptSegments]) -> tuple[int, float]:
    """(code_snippets, mean_snippet_size) over one or many prompts."""
    if isinstance(segments, PromptSegments):
        segments = [segments]
    sizes = [s.size_chars for seg in segments for s in seg.snippets]
    if not sizes:
        return 0, 0.0
    return len(sizes), sum(sizes) / len(sizes)


def count_urls(prompt_raw: str) -> int:
    """Scheme-matched URL spans; duplicate occurrences count separately."""
    return len(URL_RE.findall(prompt_raw))


def count_code_descriptions(
    segments: PromptSegments | list[PromptSegments],
    sentences: list[Sentence],
) -> int:
    """Prose sentences mentioning at least one snippet identifier.

    Matching is case-sensitive against token surfaces; each sentence
    counts at most once.
    """
    if isinstance(segments, PromptSegments):
        segments = [segments]
    identifiers: set[str] = set()
    for seg in segments:
        for sn in seg.snippets:
            identifiers |= sn.identifiers
    if not identifiers:
        return 0
    count = 0
    for s in sentences:
        for t in s.tokens:
            if t.kind in (TokenKind.WORD, TokenKind.CODE) and t.surface in identifiers:
                count += 1
                break
    return count


def code_metrics_from_parts(
    segments: PromptSegments | list[PromptSegments],
    sentences: list[Sentence],
    raw_prompts: list[str],
) -> CodeMetrics:
    seg_list = [segments] if isinstance(segments, PromptSegments) else list(segments)
    n_snippets, mean_size = snippet_stats(seg_list)
    return CodeMetrics(
        code_snippets=n_snippets,
        error_messages=sum(len(s.errors) for s in seg_list),
        urls=sum(count_urls(r) for r in raw_prompts),
        code_descriptions=count_code_descriptions(seg_list, sentences),
        mean_snippet_size=mean_size,
    )
