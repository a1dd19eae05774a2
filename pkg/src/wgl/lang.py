"""Textual construction format (`.wgl`): parser, canonical serializer, linter.

One step per line, `#` comments, header line `wgl 1`. The grammar is the
keyword table in docs/format.md. Parsing is total: every byte sequence
yields either a Construction or a ParseError with a 1-based position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .geom import (
    AngleBisector,
    CircleCenterThrough,
    Construction,
    FootOnLine,
    Free,
    IntersectCC,
    IntersectLC,
    IntersectLL,
    LineThrough,
    Midpoint,
    ParallelThrough,
    PerpBisector,
    PerpThrough,
    Step,
    StepKind,
    referenced_ids,
    result_kind,
)
from .geom.construction import ID_PATTERN, MAX_COORD, MAX_ID_LEN, _SIGNATURES

HEADER = "wgl 1"
MAX_SOURCE_BYTES = 1 << 20

_NUMBER_RE = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?\Z")


class ParseErrorKind(str, Enum):
    BAD_HEADER = "BadHeader"
    BAD_TOKEN = "BadToken"
    UNKNOWN_KEYWORD = "UnknownKeyword"
    DUPLICATE_ID = "DuplicateId"
    FORWARD_REFERENCE = "ForwardReference"
    KIND_MISMATCH = "KindMismatch"
    ARITY_ERROR = "ArityError"
    BAD_NUMBER = "BadNumber"


class ParseError(Exception):
    """First syntactic or structural error in a source text."""

    def __init__(self, kind: ParseErrorKind, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.kind = kind
        self.line = line
        self.column = column
        self.message = message


class NoteKind(str, Enum):
    UNUSED_OBJECT = "UnusedObject"
    DUPLICATE_STEP = "DuplicateStep"


@dataclass(frozen=True)
class ValidationNote:
    kind: NoteKind
    object_id: str
    message: str


# keyword -> (step class, arg pattern); 'n' number, 'i' id, 'b' branch
_KEYWORDS: dict[str, tuple[type, str]] = {
    "free": (Free, "nn"),
    "line": (LineThrough, "ii"),
    "mid": (Midpoint, "ii"),
    "perpbis": (PerpBisector, "ii"),
    "bisector": (AngleBisector, "iii"),
    "perp": (PerpThrough, "ii"),
    "parallel": (ParallelThrough, "ii"),
    "xll": (IntersectLL, "ii"),
    "circle": (CircleCenterThrough, "ii"),
    "xlc": (IntersectLC, "iib"),
    "xcc": (IntersectCC, "iib"),
    "foot": (FootOnLine, "ii"),
}

_KEYWORD_OF_STEP = {cls: kw for kw, (cls, _) in _KEYWORDS.items()}


def _tokens(line: str) -> list[tuple[str, int]]:
    """(token, 1-based column) pairs; text from the first '#' on is comment."""
    hash_at = line.find("#")
    if hash_at >= 0:
        line = line[:hash_at]
    out = []
    col = 0
    length = len(line)
    while col < length:
        if line[col] in " \t":
            col += 1
            continue
        start = col
        while col < length and line[col] not in " \t":
            col += 1
        out.append((line[start:col], start + 1))
    return out


def _parse_number(token: str, lineno: int, col: int) -> float:
    if not _NUMBER_RE.match(token):
        raise ParseError(ParseErrorKind.BAD_NUMBER, lineno, col, f"bad number {token!r}")
    value = float(token)
    if not math.isfinite(value) or abs(value) > MAX_COORD:
        raise ParseError(
            ParseErrorKind.BAD_NUMBER, lineno, col, f"coordinate {token!r} out of range"
        )
    return value


def _parse_id(token: str, lineno: int, col: int) -> str:
    if not ID_PATTERN.match(token) or len(token) > MAX_ID_LEN:
        raise ParseError(ParseErrorKind.BAD_TOKEN, lineno, col, f"bad identifier {token!r}")
    return token


def parse_step_line(
    line: str, lineno: int, known_kinds: dict[str, str]
) -> Step | None:
    """Parse one step line against already-defined objects; None for blank lines."""
    toks = _tokens(line)
    if not toks:
        return None
    keyword, kw_col = toks[0]
    if keyword not in _KEYWORDS:
        raise ParseError(
            ParseErrorKind.UNKNOWN_KEYWORD, lineno, kw_col, f"unknown keyword {keyword!r}"
        )
    cls, pattern = _KEYWORDS[keyword]
    want = 1 + len(pattern)  # id plus arguments
    if len(toks) - 1 != want:
        raise ParseError(
            ParseErrorKind.ARITY_ERROR,
            lineno,
            kw_col,
            f"'{keyword}' takes {want} arguments, got {len(toks) - 1}",
        )
    name_tok, name_col = toks[1]
    name = _parse_id(name_tok, lineno, name_col)
    if name in known_kinds:
        raise ParseError(
            ParseErrorKind.DUPLICATE_ID, lineno, name_col, f"duplicate id {name!r}"
        )
    args: list[object] = []
    arg_kinds = _SIGNATURES[cls][1]
    ref_index = 0
    for spec, (tok, col) in zip(pattern, toks[2:]):
        if spec == "n":
            args.append(_parse_number(tok, lineno, col))
        elif spec == "b":
            if tok not in ("1", "2"):
                raise ParseError(
                    ParseErrorKind.BAD_TOKEN, lineno, col, f"branch must be 1 or 2, got {tok!r}"
                )
            args.append(int(tok))
        else:
            ref = _parse_id(tok, lineno, col)
            if ref not in known_kinds:
                raise ParseError(
                    ParseErrorKind.FORWARD_REFERENCE,
                    lineno,
                    col,
                    f"{ref!r} is not defined yet",
                )
            expected = arg_kinds[ref_index]
            if known_kinds[ref] != expected:
                raise ParseError(
                    ParseErrorKind.KIND_MISMATCH,
                    lineno,
                    col,
                    f"{ref!r} is a {known_kinds[ref]}, expected a {expected}",
                )
            args.append(ref)
            ref_index += 1
    return Step(name, cls(*args))


def parse(source: str) -> Construction:
    """Parse a full source text. Raises ParseError on the first error."""
    if len(source.encode("utf-8", errors="replace")) > MAX_SOURCE_BYTES:
        raise ParseError(ParseErrorKind.BAD_TOKEN, 1, 1, "source exceeds 1 MiB")
    lines = source.split("\n")
    steps: list[Step] = []
    known_kinds: dict[str, str] = {}
    saw_header = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not saw_header:
            toks = _tokens(line)
            if not toks:
                continue
            if [t for t, _ in toks] != HEADER.split():
                raise ParseError(
                    ParseErrorKind.BAD_HEADER,
                    lineno,
                    toks[0][1],
                    f"expected header {HEADER!r}",
                )
            saw_header = True
            continue
        step = parse_step_line(line, lineno, known_kinds)
        if step is None:
            continue
        steps.append(step)
        known_kinds[step.name] = result_kind(step.kind)
    if not saw_header:
        raise ParseError(ParseErrorKind.BAD_HEADER, 1, 1, f"missing header {HEADER!r}")
    return Construction(steps)


def step_keyword(step: Step) -> str:
    return _KEYWORD_OF_STEP[type(step.kind)]


def step_args(step: Step) -> list:
    """JSON-ready argument list in keyword order (floats, ids, branch)."""
    kind = step.kind
    if isinstance(kind, Free):
        return [kind.x, kind.y]
    args: list = list(referenced_ids(kind))
    if isinstance(kind, (IntersectLC, IntersectCC)):
        args.append(kind.branch)
    return args


def build_step(keyword: str, name: str, args: list) -> Step:
    """Inverse of (step_keyword, name, step_args); raises ValueError on bad input."""
    if keyword not in _KEYWORDS:
        raise ValueError(f"unknown step keyword {keyword!r}")
    if not ID_PATTERN.match(name) or len(name) > MAX_ID_LEN:
        raise ValueError(f"bad identifier {name!r}")
    cls, pattern = _KEYWORDS[keyword]
    if len(args) != len(pattern):
        raise ValueError(f"'{keyword}' takes {len(pattern)} arguments, got {len(args)}")
    parsed: list[object] = []
    for spec, arg in zip(pattern, args):
        if spec == "n":
            if not isinstance(arg, (int, float)) or isinstance(arg, bool):
                raise ValueError(f"expected a number, got {arg!r}")
            value = float(arg)
            if not math.isfinite(value) or abs(value) > MAX_COORD:
                raise ValueError(f"coordinate {arg!r} out of range")
            parsed.append(value)
        elif spec == "b":
            if arg not in (1, 2):
                raise ValueError(f"branch must be 1 or 2, got {arg!r}")
            parsed.append(int(arg))
        else:
            if not isinstance(arg, str) or not ID_PATTERN.match(arg) or len(arg) > MAX_ID_LEN:
                raise ValueError(f"bad identifier {arg!r}")
            parsed.append(arg)
    return Step(name, cls(*parsed))


def serialize_step(step: Step) -> str:
    """One canonical step line (no newline)."""
    kind = step.kind
    keyword = _KEYWORD_OF_STEP[type(kind)]
    if isinstance(kind, Free):
        return f"{keyword} {step.name} {repr(kind.x)} {repr(kind.y)}"
    parts = [keyword, step.name]
    parts.extend(referenced_ids(kind))
    if isinstance(kind, (IntersectLC, IntersectCC)):
        parts.append(str(kind.branch))
    return " ".join(parts)


def serialize(construction: Construction) -> str:
    """Canonical text: header, one step per line, LF endings, shortest floats."""
    lines = [HEADER]
    lines.extend(serialize_step(step) for step in construction.steps)
    return "\n".join(lines) + "\n"


def validate(construction: Construction) -> list[ValidationNote]:
    """Static lint, never evaluates coordinates.

    Flags free points nothing references (only once the construction has
    constructed steps at all: a bare set of free points is a valid sketch)
    and redundant structurally-identical steps.
    """
    notes: list[ValidationNote] = []
    referenced: set[str] = set()
    has_constructed = False
    seen_kinds: dict[StepKind, str] = {}
    for step in construction.steps:
        referenced.update(referenced_ids(step.kind))
        if not isinstance(step.kind, Free):
            has_constructed = True
            prior = seen_kinds.get(step.kind)
            if prior is not None:
                notes.append(
                    ValidationNote(
                        NoteKind.DUPLICATE_STEP,
                        step.name,
                        f"step '{step.name}' repeats the construction of '{prior}'",
                    )
                )
            else:
                seen_kinds[step.kind] = step.name
    if has_constructed:
        for step in construction.steps:
            if isinstance(step.kind, Free) and step.name not in referenced:
                notes.append(
                    ValidationNote(
                        NoteKind.UNUSED_OBJECT,
                        step.name,
                        f"free point '{step.name}' is never used",
                    )
                )
    return notes
