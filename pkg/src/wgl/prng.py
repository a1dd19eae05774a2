"""Pinned deterministic PRNG for reproducible probing.

SplitMix64, exactly as specified in docs/prng.md. Every implementation of
the probe (any language) must reproduce this stream bit for bit, which is
why we do not use ``random`` here.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit generator with a splitmix-style state advance.

    State advances by the golden-gamma constant; output is the finalized
    mix of the new state. Doubles take the top 53 bits.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def next_double(self) -> float:
        """Uniform double in [0, 1), 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + self.next_double() * (hi - lo)
