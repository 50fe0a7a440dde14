"""Counter-based pseudo-random numbers (SplitMix64).

Every random choice in the solver flows through one master seed.  Streams for
independent purposes (shift vectors, gamma constants, probe matrices, ...) are
derived from the master seed plus string/integer tags, so adding a consumer
never perturbs the draws of another.  The generator is pure Python integer
arithmetic and therefore bit-reproducible across platforms.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def derive_seed(seed: int, *tags) -> int:
    """Fold string/int tags into a seed to name an independent stream."""
    h = _mix(seed & _MASK)
    for tag in tags:
        t = _fnv1a(tag) if isinstance(tag, str) else _mix(int(tag) & _MASK)
        h = _mix(h ^ t)
    return h


class SplitMix64:
    """Counter-based generator: output ``i`` is ``mix(seed + i * gamma)``."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK
        self._counter = 0
        self._spare_normal = None

    def next_u64(self) -> int:
        self._counter += 1
        return _mix((self._seed + self._counter * _GAMMA) & _MASK)

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (_MASK // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def unit_complex(self) -> complex:
        """Point on the complex unit circle, uniform in angle."""
        theta = 2.0 * math.pi * self.uniform()
        return complex(math.cos(theta), math.sin(theta))

    def normal(self) -> float:
        if self._spare_normal is not None:
            v = self._spare_normal
            self._spare_normal = None
            return v
        while True:
            u1 = self.uniform()
            if u1 > 0.0:
                break
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare_normal = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)

    def complex_normal(self) -> complex:
        """Standard complex normal (unit variance in total)."""
        return complex(self.normal(), self.normal()) / math.sqrt(2.0)


def stream(seed: int, *tags) -> SplitMix64:
    return SplitMix64(derive_seed(seed, *tags))
