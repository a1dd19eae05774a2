from __future__ import annotations

import math
from dataclasses import dataclass

import pytest

from wgl import fixtures
from wgl.geom import Point, dist
from wgl.lang import parse
from wgl.prng import SplitMix64
from wgl.repository import RepositoryStore, Role, User

# scrypt is deliberately slow at production cost; tests use the floor cost
FAST_SCRYPT = (16, 2, 1)


@dataclass
class Classroom:
    store: RepositoryStore
    admin: User
    teacher: User
    students: list[User]
    passwords: dict[str, str]


def make_classroom(data_dir, n_students: int = 3, **store_kwargs) -> Classroom:
    store = RepositoryStore(data_dir, scrypt_params=FAST_SCRYPT, **store_kwargs)
    admin = store.seed_admin("root", "Administrator", "root-pw")
    teacher = store.create_user(admin, "ana", "Ana", Role.TEACHER, "ana-pw")
    students = [
        store.create_user(teacher, f"stu{i}", f"Student {i}", Role.STUDENT, f"stu{i}-pw")
        for i in range(n_students)
    ]
    passwords = {"root": "root-pw", "ana": "ana-pw"}
    passwords.update({f"stu{i}": f"stu{i}-pw" for i in range(n_students)})
    return Classroom(store, admin, teacher, students, passwords)


@pytest.fixture
def classroom(tmp_path) -> Classroom:
    return make_classroom(tmp_path / "data")


@pytest.fixture
def incenter_construction():
    return parse(fixtures.INCENTER)


def incenter_oracle(a: Point, b: Point, c: Point) -> tuple[Point, float]:
    """Incenter and inradius from side lengths, independent of the kernel path.

    I = (la*A + lb*B + lc*C) / (la+lb+lc) with la,lb,lc the side lengths
    opposite each vertex; r = area / semiperimeter.
    """
    la = dist(b, c)
    lb = dist(c, a)
    lc = dist(a, b)
    s = la + lb + lc
    ix = (la * a.x + lb * b.x + lc * c.x) / s
    iy = (la * a.y + lb * b.y + lc * c.y) / s
    area = abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) / 2.0
    return Point(ix, iy), area / (s / 2.0)


def triangle_area(a: Point, b: Point, c: Point) -> float:
    return abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) / 2.0


def seeded_triangles(seed: int, count: int, min_area: float = 1.0):
    """Deterministic stream of well-shaped triangles in [-10, 10]^2."""
    rng = SplitMix64(seed)
    out = []
    while len(out) < count:
        pts = [Point(rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(3)]
        a, b, c = pts
        if triangle_area(a, b, c) < min_area:
            continue
        if min(dist(a, b), dist(b, c), dist(c, a)) < 1.0:
            continue
        out.append((a, b, c))
    return out


def assert_close(actual: float, expected: float, tol: float = 1e-9):
    assert math.isfinite(actual)
    assert abs(actual - expected) < tol, f"{actual} != {expected} (tol {tol})"
