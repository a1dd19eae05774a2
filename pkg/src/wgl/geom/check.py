"""Defining-relation residuals: how far a figure is from honoring each step.

Used by property tests (drag invariance) and by the kernel's own sanity
checks. A committed figure must keep every residual below EPS.
"""

from __future__ import annotations

import math

from . import objects as g
from .construction import (
    AngleBisector,
    CircleCenterThrough,
    Construction,
    Figure,
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
)
from .objects import Line, Point


def _line_residuals(fig: Figure, step: Step) -> list[float]:
    kind = step.kind
    if isinstance(kind, LineThrough):
        ln = fig.line(step.name)
        return [abs(ln.eval_at(fig.point(kind.p))), abs(ln.eval_at(fig.point(kind.q)))]
    if isinstance(kind, PerpBisector):
        ln = fig.line(step.name)
        p, q = fig.point(kind.p), fig.point(kind.q)
        mid = g.midpoint(p, q)
        # passes through the midpoint, normal parallel to pq
        cross = ln.a * (q.y - p.y) - ln.b * (q.x - p.x)
        return [abs(ln.eval_at(mid)), abs(cross) / max(g.dist(p, q), 1.0)]
    if isinstance(kind, AngleBisector):
        ln = fig.line(step.name)
        a, v, b = fig.point(kind.a), fig.point(kind.v), fig.point(kind.b)
        arm_a = g.line_through(v, a)
        arm_b = g.line_through(v, b)
        # a point one unit along the bisector is equidistant from both arms
        probe = Point(v.x - ln.b, v.y + ln.a)
        return [
            abs(ln.eval_at(v)),
            abs(abs(arm_a.eval_at(probe)) - abs(arm_b.eval_at(probe))),
        ]
    if isinstance(kind, PerpThrough):
        ln = fig.line(step.name)
        parent = fig.line(kind.line)
        return [abs(ln.eval_at(fig.point(kind.p))), abs(ln.a * parent.a + ln.b * parent.b)]
    if isinstance(kind, ParallelThrough):
        ln = fig.line(step.name)
        parent = fig.line(kind.line)
        return [abs(ln.eval_at(fig.point(kind.p))), abs(ln.a * parent.b - ln.b * parent.a)]
    raise TypeError(step)


def step_residuals(fig: Figure, step: Step) -> list[float]:
    """Residuals of the step's defining relations, all ~0 for a valid figure."""
    kind = step.kind
    if isinstance(kind, Free):
        return [0.0]
    if isinstance(kind, (LineThrough, PerpBisector, AngleBisector, PerpThrough, ParallelThrough)):
        res = _line_residuals(fig, step)
        ln = fig.line(step.name)
        res.append(abs(ln.a * ln.a + ln.b * ln.b - 1.0))
        return res
    if isinstance(kind, Midpoint):
        m = fig.point(step.name)
        p, q = fig.point(kind.p), fig.point(kind.q)
        return [abs(m.x - (p.x + q.x) / 2.0), abs(m.y - (p.y + q.y) / 2.0)]
    if isinstance(kind, IntersectLL):
        x = fig.point(step.name)
        return [abs(fig.line(kind.l1).eval_at(x)), abs(fig.line(kind.l2).eval_at(x))]
    if isinstance(kind, CircleCenterThrough):
        c = fig.circle(step.name)
        center, through = fig.point(kind.center), fig.point(kind.through)
        return [
            abs(c.center.x - center.x),
            abs(c.center.y - center.y),
            abs(c.radius - g.dist(center, through)),
        ]
    if isinstance(kind, IntersectLC):
        x = fig.point(step.name)
        circle = fig.circle(kind.circle)
        return [
            abs(fig.line(kind.line).eval_at(x)),
            abs(g.dist(x, circle.center) - circle.radius),
        ]
    if isinstance(kind, IntersectCC):
        x = fig.point(step.name)
        c1, c2 = fig.circle(kind.c1), fig.circle(kind.c2)
        return [
            abs(g.dist(x, c1.center) - c1.radius),
            abs(g.dist(x, c2.center) - c2.radius),
        ]
    if isinstance(kind, FootOnLine):
        f = fig.point(step.name)
        p = fig.point(kind.p)
        ln = fig.line(kind.line)
        # on the line, and pf runs along the normal
        along = (f.x - p.x) * -ln.b + (f.y - p.y) * ln.a
        return [abs(ln.eval_at(f)), abs(along)]
    raise TypeError(step)


def max_residual(construction: Construction, fig: Figure) -> float:
    """Worst defining-relation residual over all steps."""
    worst = 0.0
    for step in construction.steps:
        worst = max(worst, max(step_residuals(fig, step)))
    return worst


def line_norm_ok(ln: Line) -> bool:
    """Unit normal within 1e-12 and canonical sign."""
    if abs(ln.a * ln.a + ln.b * ln.b - 1.0) >= g.NORM_EPS:
        return False
    return ln.a > 0.0 or (ln.a == 0.0 and ln.b > 0.0)


def figure_norms_ok(fig: Figure) -> bool:
    return all(line_norm_ok(o) for o in fig.objects.values() if isinstance(o, Line))


def is_finite_figure(fig: Figure) -> bool:
    for obj in fig.objects.values():
        vals: tuple[float, ...]
        if isinstance(obj, Point):
            vals = (obj.x, obj.y)
        elif isinstance(obj, Line):
            vals = (obj.a, obj.b, obj.c)
        else:
            vals = (obj.center.x, obj.center.y, obj.radius)
        if not all(math.isfinite(v) for v in vals):
            return False
    return True
