#!/usr/bin/env python3
"""Produce the recorded vectors the web client's parity tests replay.

Everything the client must reproduce byte- or bit-identically originates
here: float formatting vectors, canonical construction texts, a recorded
classroom op log, and evaluated figure coordinates.

Run from the repo root: python3 tools/gen_frontend_fixtures.py
"""

import json
import math
import struct
from pathlib import Path

from wgl import fixtures
from wgl.classroom import AddStep, ClassroomHub, MoveFreePoint, RemoveStep
from wgl.geom import Circle, Free, Line, LineThrough, Point, Step, evaluate
from wgl.lang import parse, serialize
from wgl.prng import SplitMix64
from wgl.repository import RepositoryStore, Role

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def gen_pyfloat() -> list[str]:
    values = [
        0.0, -0.0, 1.0, -1.0, 0.5, 2.0, 10.0, 100.0, 1e15, 1e16, 1e17, 1e21,
        1e-3, 1e-4, 1e-5, 1e-6, 0.1, 1 / 3, 2 / 3, math.pi, math.e,
        0.30000000000000004, 123456.78901, 2.5e-07, -2.5e-07, 5e-324,
        1.7976931348623157e308, 2.2250738585072014e-308, 9007199254740993.0,
        1234567890123456.7, 0.0001, 0.00001234, 42.0, -42.5, 3e4,
    ]
    rng = SplitMix64(2718)
    for _ in range(500):
        exp = int(rng.next_u64() % 41) - 20
        mantissa = rng.uniform(-1, 1)
        values.append(mantissa * 10.0**exp)
    for _ in range(100):
        bits = rng.next_u64() & 0x7FEFFFFFFFFFFFFF  # finite doubles only
        values.append(struct.unpack("<d", struct.pack("<Q", bits))[0])
    return [repr(v) for v in values]


def gen_roundtrip() -> list[str]:
    from tests.test_lang import random_construction

    rng = SplitMix64(424242)
    texts = [fixtures.INCENTER, fixtures.CIRCUMCENTER, fixtures.ORTHOCENTER]
    for _ in range(50):
        c = random_construction(rng, n_steps=1 + int(rng.next_u64() % 12))
        texts.append(serialize(c))
    return texts


def gen_oplog(tmp_dir: Path) -> dict:
    store = RepositoryStore(tmp_dir / "oplog-data", scrypt_params=(16, 2, 1))
    admin = store.seed_admin("root", "Root", "pw")
    teacher = store.create_user(admin, "ana", "Ana", Role.TEACHER, "pw")
    student = store.create_user(teacher, "rui", "Rui", Role.STUDENT, "pw")
    hub = ClassroomHub(store)
    session = hub.create_session(teacher)
    hub.join(session.session_id, student)

    events: list[dict] = []
    hub.attach(session.session_id, student.user_id, events.append)

    uid = student.user_id
    sid = session.session_id
    ops = [
        AddStep(Step("A", Free(0.0, 0.0))),
        AddStep(Step("B", Free(4.0, 0.0))),
        AddStep(Step("C", Free(0.1, 3.3))),
        AddStep(Step("ab", LineThrough("A", "B"))),
        MoveFreePoint("C", -2.5e-07, 3.0000000000000004),
        AddStep(Step("bc", LineThrough("B", "C"))),
        RemoveStep("ab"),
        MoveFreePoint("A", 1e-05, -12345.678),
    ]
    seq = 0
    for op in ops:
        seq += 1
        result = hub.apply_op(sid, uid, student, op, seq)
        assert isinstance(result, int), result
    mid_snapshot_at = 4
    wb = session.workbenches[uid]
    frames = [e for e in events if e["t"] == "op_applied"]
    assert [f["op_seq"] for f in frames] == list(range(1, seq + 1))
    return {
        "frames": frames,
        "final_seq": seq,
        "final_body": serialize(wb.construction),
        "mid_snapshot": {
            "t": "snapshot",
            "target": uid,
            "seq": mid_snapshot_at,
            "body": serialize(_replay_prefix(frames, mid_snapshot_at)),
            "dirty": True,
        },
        "owner": uid,
    }


def _replay_prefix(frames, upto):
    from wgl.classroom import apply_to_construction, payload_to_op
    from wgl.geom.construction import EMPTY

    c = EMPTY
    for frame in frames[:upto]:
        c = apply_to_construction(c, payload_to_op(frame))
    return c


def _point(p: Point) -> list[float]:
    return [p.x, p.y]


def gen_figures() -> dict:
    incenter = parse(fixtures.INCENTER)
    fig = evaluate(incenter)
    branchy = parse(
        "wgl 1\n"
        "free A 0.0 0.0\n"
        "free B 4.0 0.0\n"
        "free C 0.1 2.7\n"
        "line ab A B\n"
        "circle k C A\n"
        "xlc P1 ab k 1\n"
        "xlc P2 ab k 2\n"
        "circle m A B\n"
        "xcc Q1 k m 1\n"
        "xcc Q2 k m 2\n"
    )
    bfig = evaluate(branchy)

    def dump(figure, names):
        out = {}
        for name in names:
            obj = figure.objects[name]
            if isinstance(obj, Point):
                out[name] = {"kind": "point", "coords": _point(obj)}
            elif isinstance(obj, Line):
                out[name] = {"kind": "line", "coords": [obj.a, obj.b, obj.c]}
            elif isinstance(obj, Circle):
                out[name] = {"kind": "circle", "coords": [obj.center.x, obj.center.y, obj.radius]}
        return out

    return {
        "incenter": {
            "source": fixtures.INCENTER,
            "objects": dump(fig, [s.name for s in incenter.steps]),
        },
        "branches": {
            "source": (
                "wgl 1\n"
                "free A 0.0 0.0\n"
                "free B 4.0 0.0\n"
                "free C 0.1 2.7\n"
                "line ab A B\n"
                "circle k C A\n"
                "xlc P1 ab k 1\n"
                "xlc P2 ab k 2\n"
                "circle m A B\n"
                "xcc Q1 k m 1\n"
                "xcc Q2 k m 2\n"
            ),
            "objects": dump(bfig, [s.name for s in branchy.steps]),
        },
    }


def main() -> None:
    import tempfile

    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / "pyfloat.json").write_text(json.dumps(gen_pyfloat(), indent=1) + "\n")
    (OUT / "roundtrip.json").write_text(json.dumps(gen_roundtrip(), indent=1) + "\n")
    with tempfile.TemporaryDirectory() as tmp:
        (OUT / "oplog.json").write_text(json.dumps(gen_oplog(Path(tmp)), indent=1) + "\n")
    (OUT / "figures.json").write_text(json.dumps(gen_figures(), indent=1) + "\n")
    print("fixtures written to", OUT)


if __name__ == "__main__":
    main()
