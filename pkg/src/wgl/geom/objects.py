"""Primitive geometric objects and the ruler-and-compass operations on them.

All coordinates are plain IEEE doubles. Every operation is pure and
deterministic; degenerate inputs raise :class:`Degeneracy` instead of
producing garbage coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Degeneracy predicates use EPS; line normalization is checked to NORM_EPS.
EPS = 1e-9
NORM_EPS = 1e-12


class ErrorKind(str, Enum):
    PARALLEL_LINES = "ParallelLines"
    COINCIDENT_POINTS = "CoincidentPoints"
    NO_INTERSECTION = "NoIntersection"
    DEGENERATE_ANGLE = "DegenerateAngle"
    # Defensive guard: figures must never hold NaN/inf coordinates.
    NON_FINITE = "NonFinite"


class Degeneracy(Exception):
    """A geometric operation has no result for these concrete inputs."""

    def __init__(self, kind: ErrorKind, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Line:
    """Locus of a*x + b*y + c = 0 with a^2 + b^2 = 1.

    Sign convention: a > 0, or a == 0 and b > 0.
    """

    a: float
    b: float
    c: float

    def eval_at(self, p: Point) -> float:
        """Signed distance of p from the line (normal is unit length)."""
        return self.a * p.x + self.b * p.y + self.c


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float


GeomObject = Point | Line | Circle


def dist(p: Point, q: Point) -> float:
    dx = q.x - p.x
    dy = q.y - p.y
    return math.sqrt(dx * dx + dy * dy)


def make_line(a: float, b: float, c: float) -> Line:
    """Normalize raw coefficients into a canonical Line.

    Raises Degeneracy(COINCIDENT_POINTS) when the normal is too short to
    define a direction.
    """
    norm = math.sqrt(a * a + b * b)
    if norm < EPS:
        raise Degeneracy(ErrorKind.COINCIDENT_POINTS, "line has no direction")
    a, b, c = a / norm, b / norm, c / norm
    if a < 0.0 or (a == 0.0 and b < 0.0):
        a, b, c = -a, -b, -c
    # fold -0.0 into +0.0 so equal lines compare equal
    return Line(a + 0.0, b + 0.0, c + 0.0)


def line_through(p: Point, q: Point) -> Line:
    """Line through two distinct points."""
    if dist(p, q) < EPS:
        raise Degeneracy(ErrorKind.COINCIDENT_POINTS, "points coincide")
    dx = q.x - p.x
    dy = q.y - p.y
    return make_line(-dy, dx, -(-dy * p.x + dx * p.y))


def midpoint(p: Point, q: Point) -> Point:
    return Point((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)


def perp_bisector(p: Point, q: Point) -> Line:
    """Locus of points equidistant from p and q."""
    if dist(p, q) < EPS:
        raise Degeneracy(ErrorKind.COINCIDENT_POINTS, "points coincide")
    m = midpoint(p, q)
    a = q.x - p.x
    b = q.y - p.y
    return make_line(a, b, -(a * m.x + b * m.y))


def angle_bisector(a: Point, v: Point, b: Point) -> Line:
    """Internal bisector of the angle at vertex v with arms toward a and b.

    The direction is the sum of the unit vectors v->a and v->b; a straight
    angle (the sum vanishes) is degenerate, while collinear arms on the same
    side of v are fine.
    """
    la = dist(v, a)
    lb = dist(v, b)
    if la < EPS or lb < EPS:
        raise Degeneracy(ErrorKind.DEGENERATE_ANGLE, "an arm of the angle has zero length")
    ux = (a.x - v.x) / la
    uy = (a.y - v.y) / la
    wx = (b.x - v.x) / lb
    wy = (b.y - v.y) / lb
    sx = ux + wx
    sy = uy + wy
    if math.sqrt(sx * sx + sy * sy) < EPS:
        raise Degeneracy(ErrorKind.DEGENERATE_ANGLE, "straight angle has no internal bisector")
    return make_line(-sy, sx, -(-sy * v.x + sx * v.y))


def perp_through(p: Point, line: Line) -> Line:
    """Line through p perpendicular to `line`.

    Reuses the parent's unit normal (rotated) verbatim so no re-normalization
    error creeps in; only the sign rule is applied.
    """
    a = -line.b
    b = line.a
    if a < 0.0 or (a == 0.0 and b < 0.0):
        a, b = -a, -b
    return Line(a + 0.0, b + 0.0, -(a * p.x + b * p.y) + 0.0)


def parallel_through(p: Point, line: Line) -> Line:
    """Line through p parallel to `line` ((a, b) kept bit-identical)."""
    a, b = line.a, line.b
    return Line(a, b, -(a * p.x + b * p.y) + 0.0)


def intersect_ll(l1: Line, l2: Line) -> Point:
    """Intersection of two non-parallel lines. Symmetric in its arguments."""
    det = l1.a * l2.b - l2.a * l1.b
    if abs(det) < EPS:
        raise Degeneracy(ErrorKind.PARALLEL_LINES, "lines are parallel")
    x = (l1.b * l2.c - l2.b * l1.c) / det
    y = (l2.a * l1.c - l1.a * l2.c) / det
    return Point(x, y)


def circle_center_through(center: Point, through: Point) -> Circle:
    r = dist(center, through)
    if r < EPS:
        raise Degeneracy(ErrorKind.COINCIDENT_POINTS, "circle through its own center")
    return Circle(center, r)


def foot_on_line(p: Point, line: Line) -> Point:
    """Orthogonal projection of p onto the line."""
    d = line.eval_at(p)
    return Point(p.x - d * line.a, p.y - d * line.b)


def intersect_lc(line: Line, circle: Circle, branch: int) -> Point:
    """Line-circle intersection.

    Both solutions lie at foot +- h * (b, -a) where foot is the projection
    of the circle's center; branch 1 takes the smaller parameter along
    (b, -a), branch 2 the larger. At tangency both branches coincide.
    """
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    d = line.eval_at(circle.center)
    if abs(d) > circle.radius + EPS:
        raise Degeneracy(ErrorKind.NO_INTERSECTION, "line misses the circle")
    foot = Point(circle.center.x - d * line.a, circle.center.y - d * line.b)
    h_sq = circle.radius * circle.radius - d * d
    h = math.sqrt(h_sq) if h_sq > 0.0 else 0.0
    if branch == 1:
        return Point(foot.x - h * line.b, foot.y + h * line.a)
    return Point(foot.x + h * line.b, foot.y - h * line.a)


def radical_line(c1: Circle, c2: Circle) -> Line:
    """Line through the intersection points of two circles (their radical axis)."""
    a = 2.0 * (c2.center.x - c1.center.x)
    b = 2.0 * (c2.center.y - c1.center.y)
    k1 = c1.center.x**2 + c1.center.y**2 - c1.radius**2
    k2 = c2.center.x**2 + c2.center.y**2 - c2.radius**2
    if math.sqrt(a * a + b * b) < EPS:
        raise Degeneracy(ErrorKind.NO_INTERSECTION, "concentric circles do not intersect")
    return make_line(a, b, k1 - k2)


def intersect_cc(c1: Circle, c2: Circle, branch: int) -> Point:
    """Circle-circle intersection via the radical line; branch rule as intersect_lc."""
    line = radical_line(c1, c2)
    try:
        return intersect_lc(line, c1, branch)
    except Degeneracy as exc:
        if exc.kind is ErrorKind.NO_INTERSECTION:
            raise Degeneracy(ErrorKind.NO_INTERSECTION, "circles do not intersect") from None
        raise
