"""Constructions: ordered step scripts over free points, and their evaluation.

A Construction is an immutable value. Evaluating it produces a Figure (a
concrete placement of every object) or raises EvalError naming the first
step whose geometric operation has no result. Moving a free point returns a
new Construction; nothing is mutated in place.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from . import objects as g
from .objects import Circle, Degeneracy, ErrorKind, GeomObject, Line, Point

MAX_ID_LEN = 32
ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
# Free coordinates are bounded so double precision cannot overflow
# anywhere downstream (see docs/format.md).
MAX_COORD = 1e9


class StructureError(ValueError):
    """A construction violates its structural invariants (ids, references)."""


@dataclass(frozen=True)
class Free:
    x: float
    y: float


@dataclass(frozen=True)
class LineThrough:
    p: str
    q: str


@dataclass(frozen=True)
class Midpoint:
    p: str
    q: str


@dataclass(frozen=True)
class PerpBisector:
    p: str
    q: str


@dataclass(frozen=True)
class AngleBisector:
    a: str
    v: str
    b: str


@dataclass(frozen=True)
class PerpThrough:
    p: str
    line: str


@dataclass(frozen=True)
class ParallelThrough:
    p: str
    line: str


@dataclass(frozen=True)
class IntersectLL:
    l1: str
    l2: str


@dataclass(frozen=True)
class CircleCenterThrough:
    center: str
    through: str


@dataclass(frozen=True)
class IntersectLC:
    line: str
    circle: str
    branch: int


@dataclass(frozen=True)
class IntersectCC:
    c1: str
    c2: str
    branch: int


@dataclass(frozen=True)
class FootOnLine:
    p: str
    line: str


StepKind = Union[
    Free,
    LineThrough,
    Midpoint,
    PerpBisector,
    AngleBisector,
    PerpThrough,
    ParallelThrough,
    IntersectLL,
    CircleCenterThrough,
    IntersectLC,
    IntersectCC,
    FootOnLine,
]

# (result kind, argument kinds in field order) per step variant
_SIGNATURES: dict[type, tuple[str, tuple[str, ...]]] = {
    Free: ("point", ()),
    LineThrough: ("line", ("point", "point")),
    Midpoint: ("point", ("point", "point")),
    PerpBisector: ("line", ("point", "point")),
    AngleBisector: ("line", ("point", "point", "point")),
    PerpThrough: ("line", ("point", "line")),
    ParallelThrough: ("line", ("point", "line")),
    IntersectLL: ("point", ("line", "line")),
    CircleCenterThrough: ("circle", ("point", "point")),
    IntersectLC: ("point", ("line", "circle")),
    IntersectCC: ("point", ("circle", "circle")),
    FootOnLine: ("point", ("point", "line")),
}


def result_kind(kind: StepKind) -> str:
    """'point', 'line' or 'circle' produced by this step."""
    return _SIGNATURES[type(kind)][0]


def referenced_ids(kind: StepKind) -> tuple[str, ...]:
    """Ids of earlier objects this step consumes, in argument order."""
    if isinstance(kind, Free):
        return ()
    if isinstance(kind, (IntersectLC, IntersectCC)):
        return tuple(getattr(kind, f) for f in kind.__dataclass_fields__ if f != "branch")
    return tuple(getattr(kind, f) for f in kind.__dataclass_fields__)


@dataclass(frozen=True)
class Step:
    name: str
    kind: StepKind


@dataclass(frozen=True)
class EvalError(Degeneracy):
    """Evaluation failed at a specific step. Carries no partial figure."""

    failing_step: str
    kind: ErrorKind
    message: str

    def __post_init__(self):
        Exception.__init__(self, f"step '{self.failing_step}': {self.message}")


@dataclass(frozen=True)
class Figure:
    """Concrete placement of every object of an evaluated construction."""

    objects: Mapping[str, GeomObject]

    def __getitem__(self, name: str) -> GeomObject:
        return self.objects[name]

    def point(self, name: str) -> Point:
        p = self.objects[name]
        assert isinstance(p, Point)
        return p

    def line(self, name: str) -> Line:
        ln = self.objects[name]
        assert isinstance(ln, Line)
        return ln

    def circle(self, name: str) -> Circle:
        c = self.objects[name]
        assert isinstance(c, Circle)
        return c


def _check_coord(value: float, name: str) -> None:
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        raise StructureError(f"free point '{name}' has a non-finite coordinate")
    if abs(value) > MAX_COORD:
        raise StructureError(f"free point '{name}' coordinate exceeds |{MAX_COORD:g}|")


class UnknownId(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name


class NotFreePoint(ValueError):
    def __init__(self, name: str):
        super().__init__(f"'{name}' is not a free point")
        self.name = name


class Construction:
    """Ordered, acyclic script of named construction steps (immutable)."""

    __slots__ = ("steps", "_kinds")

    def __init__(self, steps: Iterable[Step]):
        steps = tuple(steps)
        kinds: dict[str, str] = {}
        for step in steps:
            if not ID_PATTERN.match(step.name) or len(step.name) > MAX_ID_LEN:
                raise StructureError(f"invalid object id {step.name!r}")
            if step.name in kinds:
                raise StructureError(f"duplicate object id '{step.name}'")
            sig_result, sig_args = _SIGNATURES[type(step.kind)]
            refs = referenced_ids(step.kind)
            for ref, want in zip(refs, sig_args):
                if ref not in kinds:
                    raise StructureError(
                        f"step '{step.name}' references '{ref}' before its definition"
                    )
                if kinds[ref] != want:
                    raise StructureError(
                        f"step '{step.name}' needs a {want} but '{ref}' is a {kinds[ref]}"
                    )
            if isinstance(step.kind, Free):
                _check_coord(step.kind.x, step.name)
                _check_coord(step.kind.y, step.name)
            if isinstance(step.kind, (IntersectLC, IntersectCC)) and step.kind.branch not in (1, 2):
                raise StructureError(f"step '{step.name}' branch must be 1 or 2")
            kinds[step.name] = sig_result
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "_kinds", kinds)

    def __setattr__(self, name, value):
        raise AttributeError("Construction is immutable")

    def __eq__(self, other) -> bool:
        return isinstance(other, Construction) and self.steps == other.steps

    def __hash__(self) -> int:
        return hash(self.steps)

    def __repr__(self) -> str:
        return f"Construction({len(self.steps)} steps)"

    def __len__(self) -> int:
        return len(self.steps)

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.steps)

    def kind_of(self, name: str) -> str:
        """'point', 'line' or 'circle'."""
        return self._kinds[name]

    def has(self, name: str) -> bool:
        return name in self._kinds

    def step(self, name: str) -> Step:
        for s in self.steps:
            if s.name == name:
                return s
        raise UnknownId(name)

    def free_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.steps if isinstance(s.kind, Free))


EMPTY = Construction(())


def _eval_step(kind: StepKind, env: dict[str, GeomObject]) -> GeomObject:
    if isinstance(kind, Free):
        return Point(kind.x, kind.y)
    if isinstance(kind, LineThrough):
        return g.line_through(env[kind.p], env[kind.q])
    if isinstance(kind, Midpoint):
        return g.midpoint(env[kind.p], env[kind.q])
    if isinstance(kind, PerpBisector):
        return g.perp_bisector(env[kind.p], env[kind.q])
    if isinstance(kind, AngleBisector):
        return g.angle_bisector(env[kind.a], env[kind.v], env[kind.b])
    if isinstance(kind, PerpThrough):
        return g.perp_through(env[kind.p], env[kind.line])
    if isinstance(kind, ParallelThrough):
        return g.parallel_through(env[kind.p], env[kind.line])
    if isinstance(kind, IntersectLL):
        return g.intersect_ll(env[kind.l1], env[kind.l2])
    if isinstance(kind, CircleCenterThrough):
        return g.circle_center_through(env[kind.center], env[kind.through])
    if isinstance(kind, IntersectLC):
        return g.intersect_lc(env[kind.line], env[kind.circle], kind.branch)
    if isinstance(kind, IntersectCC):
        return g.intersect_cc(env[kind.c1], env[kind.c2], kind.branch)
    if isinstance(kind, FootOnLine):
        return g.foot_on_line(env[kind.p], env[kind.line])
    raise TypeError(f"unknown step kind {kind!r}")


def _is_finite(obj: GeomObject) -> bool:
    if isinstance(obj, Point):
        return math.isfinite(obj.x) and math.isfinite(obj.y)
    if isinstance(obj, Line):
        return math.isfinite(obj.a) and math.isfinite(obj.b) and math.isfinite(obj.c)
    return _is_finite(obj.center) and math.isfinite(obj.radius)


def evaluate(
    construction: Construction,
    overrides: Mapping[str, tuple[float, float]] | None = None,
) -> Figure:
    """Evaluate every step in order into concrete coordinates.

    `overrides` replaces the stored coordinates of the named free points for
    this evaluation only. Raises EvalError at the first degenerate step;
    raises UnknownId/NotFreePoint when an override names a missing or
    constructed object.
    """
    if overrides:
        for name in overrides:
            if not construction.has(name):
                raise UnknownId(name)
            if not isinstance(construction.step(name).kind, Free):
                raise NotFreePoint(name)
    env: dict[str, GeomObject] = {}
    for step in construction.steps:
        kind = step.kind
        if isinstance(kind, Free) and overrides and step.name in overrides:
            x, y = overrides[step.name]
            kind = Free(float(x), float(y))
        try:
            value = _eval_step(kind, env)
        except Degeneracy as exc:
            raise EvalError(step.name, exc.kind, exc.message) from None
        if not _is_finite(value):
            raise EvalError(step.name, ErrorKind.NON_FINITE, "coordinates overflowed")
        env[step.name] = value
    return Figure(env)


def move_free(construction: Construction, name: str, x: float, y: float) -> Construction:
    """New construction with the named free point at (x, y)."""
    if not construction.has(name):
        raise UnknownId(name)
    steps = []
    for step in construction.steps:
        if step.name == name:
            if not isinstance(step.kind, Free):
                raise NotFreePoint(name)
            steps.append(Step(name, Free(float(x), float(y))))
        else:
            steps.append(step)
    return Construction(steps)
