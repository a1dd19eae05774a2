import pytest

from wgl import fixtures
from wgl.geom import (
    Construction,
    EvalError,
    ErrorKind,
    Free,
    IntersectLL,
    LineThrough,
    NotFreePoint,
    ParallelThrough,
    Point,
    Step,
    StructureError,
    UnknownId,
    dist,
    evaluate,
    intersect_ll,
    move_free,
    perp_bisector,
    perp_through,
    line_through,
)
from wgl.geom.check import figure_norms_ok, max_residual
from wgl.lang import parse
from wgl.prng import SplitMix64
from tests.conftest import assert_close, incenter_oracle, seeded_triangles


def triangle_placements(seed: int, count: int):
    rng = SplitMix64(seed)
    for _ in range(count):
        yield {
            "A": (rng.uniform(-10, 10), rng.uniform(-10, 10)),
            "B": (rng.uniform(-10, 10), rng.uniform(-10, 10)),
            "C": (rng.uniform(-10, 10), rng.uniform(-10, 10)),
        }


class TestEvaluate:
    def test_incenter_defaults(self, incenter_construction):
        fig = evaluate(incenter_construction)
        i = fig.point("I")
        expected, r = incenter_oracle(Point(0, 0), Point(4, 0), Point(0, 3))
        assert_close(i.x, expected.x)
        assert_close(i.y, expected.y)
        assert_close(fig.circle("incircle").radius, r)

    def test_override_keeps_tangency(self, incenter_construction):
        fig = evaluate(incenter_construction, {"C": (4.0, 4.0)})
        i = fig.point("I")
        dists = [abs(fig.line(n).eval_at(i)) for n in ("ab", "bc", "ca")]
        assert max(dists) - min(dists) < 1e-9

    def test_parallel_trap_reports_failing_step(self):
        c = parse(fixtures.PARALLEL_TRAP)
        with pytest.raises(EvalError) as exc:
            evaluate(c)
        assert exc.value.failing_step == "X"
        assert exc.value.kind is ErrorKind.PARALLEL_LINES

    def test_pure_reevaluation(self, incenter_construction):
        assert evaluate(incenter_construction).objects == evaluate(incenter_construction).objects

    def test_unknown_override(self, incenter_construction):
        with pytest.raises(UnknownId):
            evaluate(incenter_construction, {"nope": (0, 0)})

    def test_error_aborts_at_first_failing_step(self):
        src = (
            "wgl 1\n"
            "free A 0.0 0.0\n"
            "free B 0.0 0.0\n"  # coincides with A
            "free C 1.0 1.0\n"
            "line bad A B\n"
            "line alsobad A B\n"
        )
        with pytest.raises(EvalError) as exc:
            evaluate(parse(src))
        assert exc.value.failing_step == "bad"
        assert exc.value.kind is ErrorKind.COINCIDENT_POINTS


class TestMoveFree:
    def test_identity_move(self, incenter_construction):
        assert move_free(incenter_construction, "A", 0.0, 0.0) == incenter_construction

    def test_move_constructed_point_rejected(self, incenter_construction):
        with pytest.raises(NotFreePoint):
            move_free(incenter_construction, "I", 0.0, 0.0)

    def test_unknown_id(self, incenter_construction):
        with pytest.raises(UnknownId):
            move_free(incenter_construction, "zz", 0.0, 0.0)

    def test_value_semantics(self, incenter_construction):
        moved = move_free(incenter_construction, "B", 6.0, 0.0)
        assert incenter_construction.step("B").kind == Free(4.0, 0.0)
        assert moved.step("B").kind == Free(6.0, 0.0)

    def test_moved_inradius_matches_area_over_semiperimeter(self, incenter_construction):
        # oracle: r = area / semiperimeter for the (0,0) (6,0) (0,3) triangle
        moved = move_free(incenter_construction, "B", 6.0, 0.0)
        fig = evaluate(moved)
        _, r = incenter_oracle(Point(0, 0), Point(6, 0), Point(0, 3))
        assert_close(fig.circle("incircle").radius, r)


class TestStructure:
    def test_duplicate_id(self):
        with pytest.raises(StructureError):
            Construction([Step("A", Free(0, 0)), Step("A", Free(1, 1))])

    def test_forward_reference(self):
        with pytest.raises(StructureError):
            Construction([Step("l", LineThrough("A", "B"))])

    def test_kind_mismatch(self):
        with pytest.raises(StructureError):
            Construction(
                [
                    Step("A", Free(0, 0)),
                    Step("B", Free(1, 0)),
                    Step("l", LineThrough("A", "B")),
                    Step("bad", IntersectLL("A", "l")),
                ]
            )

    def test_huge_coordinate_rejected(self):
        with pytest.raises(StructureError):
            Construction([Step("A", Free(1e300, 0))])


class TestDragInvariance:
    def test_defining_relations_hold_or_error(self, incenter_construction):
        ok = 0
        for overrides in triangle_placements(seed=2024, count=100):
            try:
                fig = evaluate(incenter_construction, overrides)
            except EvalError:
                continue
            ok += 1
            assert max_residual(incenter_construction, fig) < 1e-9
            assert figure_norms_ok(fig)
        assert ok > 90  # random triangles are almost never degenerate

    def test_line_normalization_everywhere(self):
        c = parse(fixtures.ORTHOCENTER)
        for overrides in triangle_placements(seed=7, count=50):
            try:
                fig = evaluate(c, overrides)
            except EvalError:
                continue
            assert figure_norms_ok(fig)


class TestTriangleCenters:
    def test_incenter_concurrency(self, incenter_construction):
        for a, b, c in seeded_triangles(seed=11, count=100):
            overrides = {"A": (a.x, a.y), "B": (b.x, b.y), "C": (c.x, c.y)}
            fig = evaluate(incenter_construction, overrides)
            i1 = intersect_ll(fig.line("bisA"), fig.line("bisB"))
            i2 = intersect_ll(fig.line("bisB"), fig.line("bisC"))
            i3 = intersect_ll(fig.line("bisA"), fig.line("bisC"))
            assert dist(i1, i2) < 1e-6
            assert dist(i2, i3) < 1e-6

    def test_circumcenter_equidistant(self):
        for a, b, c in seeded_triangles(seed=12, count=100):
            o = intersect_ll(perp_bisector(a, b), perp_bisector(b, c))
            assert abs(dist(o, a) - dist(o, b)) < 1e-9
            assert abs(dist(o, b) - dist(o, c)) < 1e-9

    def test_orthocenter_concurrency(self):
        for a, b, c in seeded_triangles(seed=13, count=100):
            ha = perp_through(a, line_through(b, c))
            hb = perp_through(b, line_through(c, a))
            hc = perp_through(c, line_through(a, b))
            h1 = intersect_ll(ha, hb)
            h2 = intersect_ll(hb, hc)
            h3 = intersect_ll(ha, hc)
            assert dist(h1, h2) < 1e-6
            assert dist(h2, h3) < 1e-6

    def test_345_circumcenter_and_orthocenter(self):
        c = parse(fixtures.CIRCUMCENTER)
        o = evaluate(c).point("O")
        assert_close(o.x, 2.0)
        assert_close(o.y, 1.5)
        h = evaluate(parse(fixtures.ORTHOCENTER)).point("H")
        assert_close(h.x, 0.0)
        assert_close(h.y, 0.0)


def test_parallel_through_same_parent_always_fails():
    steps = [
        Step("A", Free(0, 0)),
        Step("B", Free(4, 0)),
        Step("P", Free(0, 3)),
        Step("l", LineThrough("A", "B")),
        Step("p1", ParallelThrough("P", "l")),
        Step("p2", ParallelThrough("P", "l")),
        Step("X", IntersectLL("p1", "p2")),
    ]
    with pytest.raises(EvalError) as exc:
        evaluate(Construction(steps))
    assert exc.value.kind is ErrorKind.PARALLEL_LINES
