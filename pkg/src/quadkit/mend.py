"""Best-effort repair of malformed JSON emitted by language models.

The repair runs as a fixed sequence of passes. Every pass is a single
left-to-right scan that knows whether it is inside a string, so content such
as apostrophes in an opinion expression is left untouched. A pass that changes
the text records its tag in :attr:`MendOutcome.applied_fixes`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Callable, Optional

_DQ_OPEN = "“„«"
_DQ_CLOSE = "”»"
_SQ_SMART = "‘’"
_ESCAPES = {"\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}
_IDENT_RE = re.compile(r"[^\W\d][\w$-]*|\$[\w$-]*")
_FENCE_RE = re.compile(r"```[^\n`]*\n?(.*?)(?:```|\Z)", re.DOTALL)
_PY_LITERALS = {"True": "true", "False": "false", "None": "null"}


@dataclass(frozen=True)
class MendOutcome:
    value: Any = None
    repaired: bool = False
    applied_fixes: tuple[str, ...] = ()
    ok: bool = True

    @property
    def invalid(self) -> bool:
        return not self.ok


INVALID = MendOutcome(value=None, repaired=False, applied_fixes=(), ok=False)


def _parse_int(s: str):
    n = int(s)
    return n if abs(n) < 2**53 else float(s)


def strict_parse(text: str):
    """``json.loads`` with large integers collapsed to their nearest double."""
    return json.loads(text, parse_int=_parse_int)


def _scan_string(text: str, i: int) -> int:
    """Index just past the double-quoted string starting at ``text[i]``, or len(text)."""
    n = len(text)
    i += 1
    while i < n:
        c = text[i]
        if c == "\\":
            i += 2
            continue
        if c == '"':
            return i + 1
        i += 1
    return n


def strip_fences(text: str) -> str:
    m = _FENCE_RE.search(text)
    return m.group(1) if m else text


def isolate_region(text: str) -> Optional[str]:
    """Return the first bracketed region, cut where its brackets balance.

    If the brackets never balance (truncated output) everything up to the end
    of input is kept.
    """
    starts = [p for p in (text.find("{"), text.find("[")) if p >= 0]
    if not starts:
        return None
    start = min(starts)
    depth = 0
    i, n = start, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            i = _scan_string(text, i)
            continue
        if c in "{[":
            depth += 1
        elif c in "}]":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
        i += 1
    return text[start:].rstrip()


def fix_smart_quotes(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            continue
        if c in _DQ_OPEN or c in _DQ_CLOSE:
            # a string opened by a typographic quote ends at the next one
            j = i + 1
            while j < n and text[j] not in _DQ_CLOSE and text[j] not in _DQ_OPEN:
                j += 1
            body = text[i + 1 : j].replace('"', '\\"')
            out.append('"' + body + ('"' if j < n else ""))
            i = j + 1
            continue
        out.append("'" if c in _SQ_SMART else c)
        i += 1
    return "".join(out)


def _closes_single(text: str, j: int) -> bool:
    k = j + 1
    n = len(text)
    while k < n and text[k] in " \t\r\n":
        k += 1
    return k >= n or text[k] in ",:}]"


def fix_single_quotes(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            continue
        if c == "'":
            buf = []
            j = i + 1
            while j < n:
                d = text[j]
                if d == "\\" and j + 1 < n:
                    buf.append(text[j + 1] if text[j + 1] == "'" else text[j : j + 2])
                    j += 2
                    continue
                if d == "'" and _closes_single(text, j):
                    break
                buf.append('\\"' if d == '"' else d)
                j += 1
            out.append('"' + "".join(buf) + ('"' if j < n else ""))
            i = j + 1
            continue
        out.append(c)
        i += 1
    return "".join(out)


def _prev_significant(out: list[str]) -> str:
    for chunk in reversed(out):
        s = chunk.rstrip()
        if s:
            return s[-1]
    return ""


def fix_bare_keys(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            continue
        if (c.isalpha() or c in "_$") and _prev_significant(out) in "{,":
            m = _IDENT_RE.match(text, i)
            k = m.end()
            while k < n and text[k] in " \t":
                k += 1
            if k < n and text[k] == ":":
                out.append('"' + m.group(0) + '"')
                i = m.end()
                continue
        out.append(c)
        i += 1
    return "".join(out)


def fix_trailing_commas(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            continue
        if c == ",":
            k = i + 1
            while k < n and text[k] in " \t\r\n":
                k += 1
            if k < n and text[k] in "}]":
                i += 1
                continue
        out.append(c)
        i += 1
    return "".join(out)


def _starts_value(c: str) -> bool:
    return c in '"{[-' or c.isdigit() or c.isalpha()


def fix_missing_commas(text: str) -> str:
    """Insert a comma between two adjacent values separated only by whitespace."""
    out = []
    i, n = 0, len(text)
    value_ended = False
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            out.append(c)
            i += 1
            continue
        if value_ended and _starts_value(c):
            out.append(",")
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            value_ended = True
            continue
        if c.isalnum() or c in "-+.":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "-+._"):
                j += 1
            out.append(text[i:j])
            i = j
            value_ended = True
            continue
        out.append(c)
        value_ended = c in "}]"
        i += 1
    return "".join(out)


def fix_python_literals(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            j = _scan_string(text, i)
            out.append(text[i:j])
            i = j
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            out.append(_PY_LITERALS.get(word, word))
            i = j
            continue
        out.append(c)
        i += 1
    return "".join(out)


def fix_control_chars(text: str) -> str:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c != '"':
            out.append(c)
            i += 1
            continue
        j = _scan_string(text, i)
        for ch in text[i:j]:
            if ord(ch) < 0x20:
                out.append(_ESCAPES.get(ch, f"\\u{ord(ch):04x}"))
            else:
                out.append(ch)
        i = j
    return "".join(out)


def close_strings(text: str) -> str:
    in_string = False
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if in_string and c == "\\":
            i += 2
            continue
        if c == '"':
            in_string = not in_string
        i += 1
    if not in_string:
        return text
    if i > n:
        # input ended on a lone backslash, which would escape the new quote
        text = text[:-1]
    return text + '"'


def close_brackets(text: str) -> str:
    stack = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == '"':
            i = _scan_string(text, i)
            continue
        if c in "{[":
            stack.append("}" if c == "{" else "]")
        elif c in "}]" and stack:
            stack.pop()
        i += 1
    if not stack:
        return text
    body = text.rstrip()
    if body.endswith(","):
        body = body[:-1]
    elif body.endswith(":"):
        body += " null"
    return body + "".join(reversed(stack))


PASSES: tuple[tuple[str, Callable[[str], str]], ...] = (
    ("smart_quotes", fix_smart_quotes),
    ("single_quotes", fix_single_quotes),
    ("bare_keys", fix_bare_keys),
    ("trailing_commas", fix_trailing_commas),
    ("missing_commas", fix_missing_commas),
    ("python_literals", fix_python_literals),
    ("control_chars", fix_control_chars),
    ("close_strings", close_strings),
    ("close_brackets", close_brackets),
)


def mend(raw: str) -> MendOutcome:
    """Parse ``raw`` as JSON, repairing it if a strict parse fails.

    Never raises. An unrecoverable input gives an outcome with ``ok`` False.
    """
    try:
        return MendOutcome(strict_parse(raw))
    except (ValueError, RecursionError):
        pass
    fixes = []
    stripped = strip_fences(raw)
    if stripped != raw:
        fixes.append("strip_fences")
    text = isolate_region(stripped)
    if text is None:
        return INVALID
    if text != stripped.strip():
        fixes.append("isolate_region")
    for tag, fn in PASSES:
        new = fn(text)
        if new != text:
            fixes.append(tag)
            text = new
    try:
        value = strict_parse(text)
    except (ValueError, RecursionError):
        return MendOutcome(None, False, tuple(fixes), ok=False)
    return MendOutcome(value, True, tuple(fixes))
