"""Line-oriented ``key = value`` files shared by regimes and scenarios.

Format: UTF-8 text, one pair per line, ``#`` starts a comment (anywhere on
the line), blank lines ignored, booleans spelled ``true``/``false``.
Keys may carry dotted section prefixes (``chp.capacity_mw``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import ParseError

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")


@dataclass(frozen=True)
class Entry:
    key: str
    value: str
    line: int


def parse_entries(text, path=None):
    """Split ``text`` into ordered entries, rejecting malformed and duplicate keys."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", path=path, line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ParseError(f"malformed key {key!r}", path=path, line=lineno)
        if key in entries:
            raise ParseError(
                f"duplicate key (first set on line {entries[key].line})",
                path=path, line=lineno, key=key,
            )
        if not value:
            raise ParseError("missing value", path=path, line=lineno, key=key)
        entries[key] = Entry(key, value, lineno)
    return entries


def as_float(entry, path=None):
    try:
        x = float(entry.value)
    except ValueError:
        raise ParseError(f"expected a number, got {entry.value!r}",
                         path=path, line=entry.line, key=entry.key) from None
    if not math.isfinite(x):
        raise ParseError(f"expected a finite number, got {entry.value!r}",
                         path=path, line=entry.line, key=entry.key)
    return x


def as_int(entry, path=None):
    try:
        return int(entry.value)
    except ValueError:
        raise ParseError(f"expected an integer, got {entry.value!r}",
                         path=path, line=entry.line, key=entry.key) from None


def as_bool(entry, path=None):
    if entry.value == "true":
        return True
    if entry.value == "false":
        return False
    raise ParseError(f"expected true or false, got {entry.value!r}",
                     path=path, line=entry.line, key=entry.key)


def format_number(x):
    """Locale-free, fixed-precision text form used in every report file."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    s = format(float(x), ".12g")
    return "0" if s == "-0" else s
