"""Bit-level primitives: strings over coordinates 1..n, coordinate blocks,
partitions, and the flip/splice/bisect operations everything else builds on.

Coordinates are 1-based everywhere at the interface.  The canonical integer
encoding of a string maps coordinate i to bit position i-1, so coordinate 1 is
the least significant bit.  All values are immutable.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgument
from .rng import RandomSource


def _check_same_n(a: int, b: int, what: str) -> None:
    if a != b:
        raise InvalidArgument(f"{what}: dimension mismatch ({a} vs {b})")


class BitString:
    """Fixed-length binary word over coordinates 1..n."""

    __slots__ = ("n", "value")

    def __init__(self, n: int, value: int):
        if n < 1:
            raise InvalidArgument("BitString needs n >= 1")
        if value < 0 or value >> n:
            raise InvalidArgument("encoded value out of range for n coordinates")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "value", value)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("BitString is immutable")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        v = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise InvalidArgument("bits must be 0 or 1")
            v |= b << i
        return cls(len(bits), v)

    @classmethod
    def from_text(cls, text: str) -> "BitString":
        """Parse '0110...' written coordinate 1 first."""
        if not text or any(c not in "01" for c in text):
            raise InvalidArgument(f"not a bitstring: {text!r}")
        return cls.from_bits([int(c) for c in text])

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls(n, (1 << n) - 1)

    def bit(self, i: int) -> int:
        """Value at coordinate i (1-based)."""
        if not 1 <= i <= self.n:
            raise InvalidArgument(f"coordinate {i} outside 1..{self.n}")
        return (self.value >> (i - 1)) & 1

    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> i) & 1 for i in range(self.n))

    def text(self) -> str:
        """Coordinate-1-first textual form."""
        return "".join(str(b) for b in self.bits())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitString)
            and self.n == other.n
            and self.value == other.value
        )

    def __hash__(self) -> int:
        return hash((self.n, self.value))

    def __repr__(self) -> str:
        return f"BitString({self.text()!r})"


class Block:
    """A set of coordinate indices inside a universe {1..universe_n}."""

    __slots__ = ("universe_n", "mask")

    def __init__(self, universe_n: int, members: Iterable[int] = ()):
        if universe_n < 1:
            raise InvalidArgument("Block needs universe_n >= 1")
        mask = 0
        for i in members:
            if not 1 <= i <= universe_n:
                raise InvalidArgument(f"member {i} outside 1..{universe_n}")
            mask |= 1 << (i - 1)
        object.__setattr__(self, "universe_n", universe_n)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, *a):
        raise AttributeError("Block is immutable")

    @classmethod
    def from_mask(cls, universe_n: int, mask: int) -> "Block":
        if mask < 0 or mask >> universe_n:
            raise InvalidArgument("mask out of range for universe")
        b = cls.__new__(cls)
        object.__setattr__(b, "universe_n", universe_n)
        object.__setattr__(b, "mask", mask)
        return b

    @classmethod
    def full(cls, universe_n: int) -> "Block":
        return cls.from_mask(universe_n, (1 << universe_n) - 1)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(i + 1 for i in range(self.universe_n) if (self.mask >> i) & 1)

    def complement(self) -> "Block":
        return Block.from_mask(self.universe_n, self.mask ^ ((1 << self.universe_n) - 1))

    def union(self, other: "Block") -> "Block":
        _check_same_n(self.universe_n, other.universe_n, "Block.union")
        return Block.from_mask(self.universe_n, self.mask | other.mask)

    def intersect(self, other: "Block") -> "Block":
        _check_same_n(self.universe_n, other.universe_n, "Block.intersect")
        return Block.from_mask(self.universe_n, self.mask & other.mask)

    def isdisjoint(self, other: "Block") -> bool:
        return (self.mask & other.mask) == 0

    def __contains__(self, i: int) -> bool:
        return 1 <= i <= self.universe_n and bool((self.mask >> (i - 1)) & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __bool__(self) -> bool:
        return self.mask != 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Block)
            and self.universe_n == other.universe_n
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.universe_n, self.mask))

    def __repr__(self) -> str:
        return f"Block({self.universe_n}, {set(self.members) or '{}'})"


class BlockPartition:
    """An ordered list of pairwise-disjoint blocks over one universe."""

    __slots__ = ("universe_n", "parts")

    def __init__(self, universe_n: int, parts: Sequence[Block]):
        seen = 0
        for p in parts:
            _check_same_n(p.universe_n, universe_n, "BlockPartition")
            if seen & p.mask:
                raise InvalidArgument("parts overlap")
            seen |= p.mask
        object.__setattr__(self, "universe_n", universe_n)
        object.__setattr__(self, "parts", tuple(parts))

    def __setattr__(self, *a):
        raise AttributeError("BlockPartition is immutable")

    @classmethod
    def covering(cls, universe: Block, parts: Sequence[Block]) -> "BlockPartition":
        """Partition of a specific set: parts must union to it exactly."""
        bp = cls(universe.universe_n, parts)
        if bp.union_mask != universe.mask:
            raise InvalidArgument("parts do not cover the universe set exactly")
        return bp

    @property
    def union_mask(self) -> int:
        m = 0
        for p in self.parts:
            m |= p.mask
        return m

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.parts)

    def __repr__(self) -> str:
        return f"BlockPartition({self.universe_n}, {list(self.parts)})"


def flip(x: BitString, block: Block) -> BitString:
    """Copy of x with every coordinate in the block complemented."""
    _check_same_n(x.n, block.universe_n, "flip")
    return BitString(x.n, x.value ^ block.mask)


def splice(x: BitString, w: BitString, inside: Block) -> BitString:
    """String equal to x on ``inside`` and to w everywhere else."""
    _check_same_n(x.n, w.n, "splice")
    _check_same_n(x.n, inside.universe_n, "splice")
    m = inside.mask
    return BitString(x.n, (x.value & m) | (w.value & ~m))


def _word_subset(mask: int, n: int, rng: RandomSource) -> int:
    """Random submask: each set bit kept independently with probability 1/2.

    Consumes one tick per 64 coordinates of the universe, so the n<=64 case
    matches the accelerated kernels tick for tick.
    """
    r = 0
    for w in range((n + 63) // 64):
        r |= rng.u64() << (64 * w)
    return mask & r


def random_subset(block: Block, rng: RandomSource) -> Block:
    """Uniformly random subset of the block."""
    return Block.from_mask(
        block.universe_n, _word_subset(block.mask, block.universe_n, rng)
    )


def random_bisect(block: Block, rng: RandomSource) -> tuple[Block, Block]:
    """Split a block in two, each member assigned to the first half with
    probability 1/2 independently."""
    m = _word_subset(block.mask, block.universe_n, rng)
    return (
        Block.from_mask(block.universe_n, m),
        Block.from_mask(block.universe_n, block.mask ^ m),
    )


def random_equipartition(universe: Block, s: int, rng: RandomSource) -> BlockPartition:
    """Partition a set into s parts, each member's part index uniform on
    {1..s} independently.  Parts may be empty.  One tick per member, taken in
    increasing coordinate order."""
    if s < 1:
        raise InvalidArgument("need s >= 1")
    masks = [0] * s
    for i in universe.members:
        masks[rng.below(s)] |= 1 << (i - 1)
    return BlockPartition(
        universe.universe_n, [Block.from_mask(universe.universe_n, m) for m in masks]
    )
