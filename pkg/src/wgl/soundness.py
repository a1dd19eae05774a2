"""Randomized degeneracy probing.

A construction that fails to evaluate may be broken for its current
free-point placement only, or for (numerically) every placement. We resample
all free points from a box with the pinned SplitMix64 generator and measure
the failure rate. The verdict is sampled evidence, not a proof, and every
report says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .geom import Construction, EvalError, evaluate
from .geom.construction import (
    AngleBisector,
    CircleCenterThrough,
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
)
from .prng import SplitMix64

# A few spurious failures from eps-close samples must not flip the verdict.
GENERIC_FAILURE_CEILING = 0.01

_STEP_DESCRIPTIONS = {
    Free: "free point",
    LineThrough: "line through two points",
    Midpoint: "midpoint",
    PerpBisector: "perpendicular bisector",
    AngleBisector: "angle bisector",
    PerpThrough: "perpendicular line",
    ParallelThrough: "parallel line",
    IntersectLL: "line-line intersection",
    CircleCenterThrough: "circle from center and point",
    IntersectLC: "line-circle intersection",
    IntersectCC: "circle-circle intersection",
    FootOnLine: "foot of perpendicular",
}

_KIND_CLAUSES = {
    "ParallelLines": "the lines are parallel by construction",
    "CoincidentPoints": "the defining points coincide by construction",
    "NoIntersection": "the objects never intersect",
    "DegenerateAngle": "the angle is degenerate by construction",
    "NonFinite": "the coordinates overflow",
}


class Verdict(str, Enum):
    GENERICALLY_SOUND = "GenericallySound"
    INSTANCE_DEGENERATE = "InstanceDegenerate"
    ALWAYS_DEGENERATE = "AlwaysDegenerate"


@dataclass(frozen=True)
class ProbeConfig:
    samples: int = 1000
    seed: int = 0
    box: tuple[float, float, float, float] = (-10.0, 10.0, -10.0, 10.0)  # xmin xmax ymin ymax

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        xmin, xmax, ymin, ymax = self.box
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("box must have positive area")


@dataclass(frozen=True)
class SoundnessReport:
    verdict: Verdict
    current_ok: bool
    failure_rate: float
    first_failing_step: str | None
    samples: int
    seed: int


def probe(construction: Construction, cfg: ProbeConfig = ProbeConfig()) -> SoundnessReport:
    """Evaluate at stored coordinates, then at `cfg.samples` random placements.

    The resampling stream is pinned (docs/prng.md): one SplitMix64 stream
    seeded with cfg.seed; per sample, each free point in construction order
    draws x then y uniformly from the box.
    """
    first_failing: str | None = None
    try:
        evaluate(construction)
        current_ok = True
    except EvalError as exc:
        current_ok = False
        first_failing = exc.failing_step

    free_names = construction.free_names()
    xmin, xmax, ymin, ymax = cfg.box
    rng = SplitMix64(cfg.seed)
    failures = 0
    for _ in range(cfg.samples):
        overrides = {
            name: (rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)) for name in free_names
        }
        try:
            evaluate(construction, overrides)
        except EvalError as exc:
            failures += 1
            if first_failing is None:
                first_failing = exc.failing_step

    rate = failures / cfg.samples
    if rate == 1.0:
        verdict = Verdict.ALWAYS_DEGENERATE
    elif current_ok and rate < GENERIC_FAILURE_CEILING:
        verdict = Verdict.GENERICALLY_SOUND
    else:
        verdict = Verdict.INSTANCE_DEGENERATE
    return SoundnessReport(
        verdict=verdict,
        current_ok=current_ok,
        failure_rate=rate,
        first_failing_step=first_failing,
        samples=cfg.samples,
        seed=cfg.seed,
    )


def _describe_step(construction: Construction, name: str | None) -> str:
    if name is None or not construction.has(name):
        return "unknown step"
    return _STEP_DESCRIPTIONS[type(construction.step(name).kind)]


def explain(report: SoundnessReport, construction: Construction) -> str:
    """One stable human-readable sentence; wording is frozen by snapshot tests."""
    if report.verdict is Verdict.GENERICALLY_SOUND:
        return (
            f"construction succeeded at the stored placement and at "
            f"{report.samples - round(report.failure_rate * report.samples)} of "
            f"{report.samples} sampled placements."
            if report.failure_rate > 0
            else f"construction succeeded at the stored placement and at all "
            f"{report.samples} sampled placements."
        )
    step = report.first_failing_step
    desc = _describe_step(construction, step)
    failed = round(report.failure_rate * report.samples)
    if report.verdict is Verdict.ALWAYS_DEGENERATE:
        err = _current_error(construction)
        clause = _KIND_CLAUSES.get(err, "it is degenerate by construction")
        return (
            f"step '{step}' ({desc}) fails for all {report.samples} sampled placements: "
            f"{clause}."
        )
    if not report.current_ok:
        return (
            f"step '{step}' ({desc}) fails only for the current placement: "
            f"{report.samples - failed} of {report.samples} sampled placements succeeded."
        )
    return (
        f"step '{step}' ({desc}) fails for {failed} of {report.samples} sampled placements "
        f"but succeeds at the current placement."
    )


def _current_error(construction: Construction) -> str | None:
    """Error kind at the stored placement, None when it evaluates."""
    try:
        evaluate(construction)
        return None
    except EvalError as exc:
        return exc.kind.value


def report_as_dict(report: SoundnessReport) -> dict:
    return {
        "verdict": report.verdict.value,
        "current_ok": report.current_ok,
        "failure_rate": report.failure_rate,
        "first_failing_step": report.first_failing_step,
        "samples": report.samples,
        "seed": report.seed,
    }
