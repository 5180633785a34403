"""Deterministic counter-based randomness.

Every random draw in this package is one tick of a splitmix64 stream:
``output(i) = mix64(key + GOLDEN * (i + 1))``.  Because the stream is a pure
function of ``(key, counter)``, the accelerated kernels can consume a span of
ticks in bulk and hand the counter back, and the numpy and numba backends
produce bit-identical draws.  Child streams for independent trials are derived
from ``(seed, index)`` so a trial batch is reproducible under any scheduling.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FLOAT_SCALE = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def stream_at(key: int, counter: int) -> int:
    """Value of tick ``counter`` of the stream identified by ``key``."""
    return mix64((key + GOLDEN * (counter + 1)) & MASK64)


def child_seed(seed: int, index: int) -> int:
    """Seed for the ``index``-th child stream of ``seed``.

    Used by the trial harness: trial i runs on ``RandomSource(child_seed(s, i))``
    regardless of how trials are scheduled.
    """
    return mix64((seed & MASK64) ^ mix64((GOLDEN * (index + 1)) & MASK64))


class RandomSource:
    """Seeded source of 64-bit words; one word per tick.

    Identical seed and identical call sequence give identical outputs.  The
    ``(key, counter)`` pair is exposed so accelerated kernels can continue the
    same stream; callers then advance the counter by the number of ticks the
    kernel reports consumed.
    """

    __slots__ = ("key", "counter", "seed")

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.key = int(seed) & MASK64
        self.counter = 0

    def u64(self) -> int:
        v = stream_at(self.key, self.counter)
        self.counter += 1
        return v

    def bits(self, m: int) -> int:
        """Uniform m-bit integer. Draws ceil(m/64) ticks."""
        if m <= 64:
            return self.u64() & ((1 << m) - 1) if m > 0 else 0
        v = 0
        for w in range((m + 63) // 64):
            v |= self.u64() << (64 * w)
        return v & ((1 << m) - 1)

    def float53(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.u64() >> 11) * _FLOAT_SCALE

    def below(self, m: int) -> int:
        """Uniform-ish integer in [0, m); bias is < 2**-40 for m <= 2**24."""
        return self.u64() % m

    def child(self, index: int) -> "RandomSource":
        return RandomSource(child_seed(self.seed, index))

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomSource(seed={self.seed:#x}, counter={self.counter})"
