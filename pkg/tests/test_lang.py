import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgl import fixtures
from wgl.geom import Construction, Free, Step, evaluate
from wgl.lang import (
    NoteKind,
    ParseError,
    ParseErrorKind,
    parse,
    serialize,
    validate,
)
from wgl.prng import SplitMix64
from tests.conftest import assert_close

# kind -> (needs, arg spec) used by the random generator below
_GEN_TABLE = [
    ("free", (), ""),
    ("line", ("point", "point"), "ii"),
    ("mid", ("point", "point"), "ii"),
    ("perpbis", ("point", "point"), "ii"),
    ("bisector", ("point", "point", "point"), "iii"),
    ("perp", ("point", "line"), "ii"),
    ("parallel", ("point", "line"), "ii"),
    ("xll", ("line", "line"), "ii"),
    ("circle", ("point", "point"), "ii"),
    ("xlc", ("line", "circle"), "iib"),
    ("xcc", ("circle", "circle"), "iib"),
    ("foot", ("point", "line"), "ii"),
]

_RESULT = {
    "free": "point",
    "line": "line",
    "mid": "point",
    "perpbis": "line",
    "bisector": "line",
    "perp": "line",
    "parallel": "line",
    "xll": "point",
    "circle": "circle",
    "xlc": "point",
    "xcc": "point",
    "foot": "point",
}


def random_construction(rng: SplitMix64, n_steps: int) -> Construction:
    """Structurally valid random construction driven by the pinned PRNG."""
    by_kind: dict[str, list[str]] = {"point": [], "line": [], "circle": []}
    lines = ["wgl 1"]
    for i in range(n_steps):
        options = [row for row in _GEN_TABLE if all(by_kind[k] for k in row[1])]
        keyword, needs, _spec = options[rng.next_u64() % len(options)]
        name = f"v{i}"
        if keyword == "free":
            exp = int(rng.next_u64() % 13) - 6
            x = rng.uniform(-1, 1) * 10.0**exp
            y = rng.uniform(-1, 1) * 10.0**exp
            lines.append(f"free {name} {x!r} {y!r}")
        else:
            args = [by_kind[k][rng.next_u64() % len(by_kind[k])] for k in needs]
            if keyword in ("xlc", "xcc"):
                args.append(str(1 + rng.next_u64() % 2))
            lines.append(f"{keyword} {name} {' '.join(args)}")
        by_kind[_RESULT[keyword]].append(name)
    return parse("\n".join(lines) + "\n")


class TestParse:
    def test_minimal(self):
        c = parse("wgl 1\nfree A 0 0\nfree B 4 0\nline ab A B\n")
        assert len(c) == 3
        assert c.kind_of("ab") == "line"

    def test_forward_reference(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nline ab A B\n")
        assert exc.value.kind is ParseErrorKind.FORWARD_REFERENCE
        assert exc.value.line == 2

    def test_duplicate_id(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A 0 0\nfree A 1 1\n")
        assert exc.value.kind is ParseErrorKind.DUPLICATE_ID
        assert exc.value.line == 3

    def test_incenter_fixture_evaluates(self):
        fig = evaluate(parse(fixtures.INCENTER))
        assert_close(fig.point("I").x, 1.0)
        assert_close(fig.point("I").y, 1.0)

    def test_bad_header(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 2\nfree A 0 0\n")
        assert exc.value.kind is ParseErrorKind.BAD_HEADER

    def test_missing_header(self):
        with pytest.raises(ParseError) as exc:
            parse("")
        assert exc.value.kind is ParseErrorKind.BAD_HEADER

    def test_comments_and_blank_lines(self):
        src = "# intro\n\nwgl 1\n# a point\nfree A 1 2  # trailing\n\n"
        c = parse(src)
        assert c.step("A").kind == Free(1.0, 2.0)

    def test_unknown_keyword(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nsquiggle A 0 0\n")
        assert exc.value.kind is ParseErrorKind.UNKNOWN_KEYWORD

    def test_arity(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A 0\n")
        assert exc.value.kind is ParseErrorKind.ARITY_ERROR

    def test_bad_number(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A zero 0\n")
        assert exc.value.kind is ParseErrorKind.BAD_NUMBER
        assert (exc.value.line, exc.value.column) == (2, 8)

    def test_number_out_of_range(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A 1e300 0\n")
        assert exc.value.kind is ParseErrorKind.BAD_NUMBER

    def test_kind_mismatch(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A 0 0\nfree B 1 0\nline l A B\nxll X A l\n")
        assert exc.value.kind is ParseErrorKind.KIND_MISMATCH

    def test_bad_branch(self):
        with pytest.raises(ParseError) as exc:
            parse("wgl 1\nfree A 0 0\nfree B 1 0\nline l A B\ncircle c A B\nxlc X l c 3\n")
        assert exc.value.kind is ParseErrorKind.BAD_TOKEN

    def test_crlf_tolerated(self):
        c = parse("wgl 1\r\nfree A 0 0\r\n")
        assert c.step("A").kind == Free(0.0, 0.0)

    def test_oversized_source(self):
        with pytest.raises(ParseError):
            parse("wgl 1\n" + "#" + "x" * (1 << 20) + "\n")

    @given(st.binary(max_size=300))
    def test_total_on_arbitrary_bytes(self, data):
        text = data.decode("utf-8", errors="replace")
        try:
            parse(text)
        except ParseError:
            pass

    def test_error_position_points_into_source(self):
        bad_sources = [
            "wgl 1\nfree A 0 0\nline l A\n",
            "wgl 1\nmid m P Q\n",
            "wgl 1\nfree 9bad 0 0\n",
        ]
        for src in bad_sources:
            with pytest.raises(ParseError) as exc:
                parse(src)
            lines = src.split("\n")
            assert 1 <= exc.value.line <= len(lines)
            assert 1 <= exc.value.column <= max(len(lines[exc.value.line - 1]), 1)


class TestSerialize:
    def test_empty(self):
        from wgl.geom import EMPTY

        assert serialize(EMPTY) == "wgl 1\n"

    def test_canonical_fixed_point(self):
        src = fixtures.INCENTER
        assert serialize(parse(src)) == src
        assert serialize(parse(serialize(parse(src)))) == src

    def test_float_round_trip_exact(self):
        c = Construction([Step("A", Free(0.1, -2.5e-7)), Step("B", Free(1e8, 0.30000000000000004))])
        again = parse(serialize(c))
        assert again.step("A").kind == Free(0.1, -2.5e-7)
        assert again.step("B").kind == Free(1e8, 0.30000000000000004)

    def test_thousand_random_round_trips(self):
        rng = SplitMix64(99)
        for i in range(1000):
            c = random_construction(rng, n_steps=1 + int(rng.next_u64() % 14))
            assert parse(serialize(c)) == c


@st.composite
def hypothesis_constructions(draw):
    n = draw(st.integers(min_value=1, max_value=10))
    seed = draw(st.integers(min_value=0, max_value=2**64 - 1))
    return random_construction(SplitMix64(seed), n)


coords = st.floats(min_value=-1e9, max_value=1e9, allow_nan=False, width=64)


class TestRoundTripProperty:
    @given(hypothesis_constructions())
    @settings(max_examples=200, deadline=None)
    def test_parse_serialize_identity(self, c):
        assert parse(serialize(c)) == c

    @given(coords, coords)
    @settings(max_examples=200)
    def test_any_coordinate_survives(self, x, y):
        c = Construction([Step("A", Free(x, y))])
        assert parse(serialize(c)) == c


class TestValidate:
    def test_incenter_clean(self):
        assert validate(parse(fixtures.INCENTER)) == []

    def test_unused_free_point(self):
        src = fixtures.INCENTER + "free Z 9.0 9.0\n"
        notes = validate(parse(src))
        assert len(notes) == 1
        assert notes[0].kind is NoteKind.UNUSED_OBJECT
        assert notes[0].object_id == "Z"

    def test_only_free_points_is_clean(self):
        assert validate(parse("wgl 1\nfree A 0 0\nfree B 1 1\n")) == []

    def test_duplicate_step_noted(self):
        src = "wgl 1\nfree A 0 0\nfree B 1 0\nmid M A B\nmid M2 A B\n"
        notes = validate(parse(src))
        assert [n.kind for n in notes] == [NoteKind.DUPLICATE_STEP]
        assert notes[0].object_id == "M2"
