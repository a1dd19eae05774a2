"""Unix-like record permissions: owner/group/other x read/write/visible.

Visibility gates whether a record shows up in listings; read gates loading
it; write gates saving over it. The owner always holds all three, and
write implies read within each class (both normalized on every write).
Class checks are inclusive: a group member also benefits from `other` bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Role(str, Enum):
    ADMIN = "admin"
    TEACHER = "teacher"
    STUDENT = "student"


@dataclass(frozen=True)
class PermBits:
    read: bool = False
    write: bool = False
    visible: bool = False

    def normalized(self) -> "PermBits":
        return PermBits(self.read or self.write, self.write, self.visible)

    def to_string(self) -> str:
        return ("r" if self.read else "-") + ("w" if self.write else "-") + (
            "v" if self.visible else "-"
        )

    @classmethod
    def from_string(cls, s: str) -> "PermBits":
        if len(s) != 3 or s[0] not in "r-" or s[1] not in "w-" or s[2] not in "v-":
            raise ValueError(f"bad permission bits {s!r}")
        return cls(s[0] == "r", s[1] == "w", s[2] == "v")


@dataclass(frozen=True)
class Perm:
    owner: PermBits
    group: PermBits
    other: PermBits

    def normalized(self) -> "Perm":
        return Perm(
            PermBits(True, True, True),
            self.group.normalized(),
            self.other.normalized(),
        )

    def to_string(self) -> str:
        return self.owner.to_string() + self.group.to_string() + self.other.to_string()

    @classmethod
    def from_string(cls, s: str) -> "Perm":
        if len(s) != 9:
            raise ValueError(f"bad permission string {s!r}")
        return cls(
            PermBits.from_string(s[0:3]),
            PermBits.from_string(s[3:6]),
            PermBits.from_string(s[6:9]),
        )

    @classmethod
    def from_bools(cls, bits: tuple[bool, ...]) -> "Perm":
        if len(bits) != 9:
            raise ValueError("need nine booleans")
        return cls(PermBits(*bits[0:3]), PermBits(*bits[3:6]), PermBits(*bits[6:9]))


OWNER_ONLY = Perm(PermBits(True, True, True), PermBits(), PermBits())
PUBLISHED = Perm(PermBits(True, True, True), PermBits(), PermBits(read=True, visible=True))


def perm_for_legacy_level(level: int) -> Perm:
    """Map the legacy level attribute onto permission bits.

    Negative levels were owner-only; zero and positive levels mean readable
    and visible to everyone (no write).
    """
    return OWNER_ONLY if level < 0 else PUBLISHED
