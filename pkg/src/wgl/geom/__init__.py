"""Ruler-and-compass construction kernel."""

from .construction import (
    EMPTY,
    AngleBisector,
    Circle,
    CircleCenterThrough,
    Construction,
    EvalError,
    Figure,
    FootOnLine,
    Free,
    IntersectCC,
    IntersectLC,
    IntersectLL,
    Line,
    LineThrough,
    Midpoint,
    NotFreePoint,
    ParallelThrough,
    PerpBisector,
    PerpThrough,
    Point,
    Step,
    StepKind,
    StructureError,
    UnknownId,
    evaluate,
    move_free,
    referenced_ids,
    result_kind,
)
from .objects import (
    EPS,
    NORM_EPS,
    Degeneracy,
    ErrorKind,
    angle_bisector,
    circle_center_through,
    dist,
    foot_on_line,
    intersect_cc,
    intersect_lc,
    intersect_ll,
    line_through,
    make_line,
    midpoint,
    parallel_through,
    perp_bisector,
    perp_through,
)

__all__ = [
    "EMPTY",
    "EPS",
    "NORM_EPS",
    "AngleBisector",
    "Circle",
    "CircleCenterThrough",
    "Construction",
    "Degeneracy",
    "ErrorKind",
    "EvalError",
    "Figure",
    "FootOnLine",
    "Free",
    "IntersectCC",
    "IntersectLC",
    "IntersectLL",
    "Line",
    "LineThrough",
    "Midpoint",
    "NotFreePoint",
    "ParallelThrough",
    "PerpBisector",
    "PerpThrough",
    "Point",
    "Step",
    "StepKind",
    "StructureError",
    "UnknownId",
    "angle_bisector",
    "circle_center_through",
    "dist",
    "evaluate",
    "foot_on_line",
    "intersect_cc",
    "intersect_lc",
    "intersect_ll",
    "line_through",
    "make_line",
    "midpoint",
    "move_free",
    "parallel_through",
    "perp_bisector",
    "perp_through",
    "referenced_ids",
    "result_kind",
]
