"""The three block-level subroutines the testers are assembled from:

* block binary search: isolate one relevant block from a disagreeing pair,
* a literal check: is a relevant block's restriction close to one literal,
* literal orientation: race the two halves of a bisected near-literal block
  to find the half holding the influencing coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import orientation as _orientation_kernel
from .bits import BitString, Block, BlockPartition, flip, random_bisect
from .errors import ContractError, InvalidArgument
from .oracle import FunctionOracle
from .rng import RandomSource
from .uniformjunta import uniform_junta_test

LITERAL_GAMMA = 0.125
SPLIT_SEARCH_ATTEMPTS = 64


def block_binary_search(
    f: FunctionOracle, x: BitString, y: BitString, blocks: BlockPartition
) -> tuple[Block, BitString]:
    """Find one block whose flip provably changes f, given f(x) != f(y) and
    y = x with exactly the union of the blocks flipped.

    Returns (found block, witness z) with f(z) != f(z ^ found).  Uses at most
    ceil(log2(#blocks)) + 2 queries including the two verification queries.
    """
    parts = [b for b in blocks.parts if b]
    if not parts:
        raise InvalidArgument("need at least one nonempty block")
    if x.value ^ y.value != blocks.union_mask:
        raise InvalidArgument("y must differ from x exactly on the union of the blocks")
    vx = f.eval(x)
    vy = f.eval(y)
    if vx == vy:
        raise ContractError("f(x) = f(y): no relevant block to isolate")
    a, va = x.value, vx
    lo, hi = 0, len(parts)
    while hi - lo > 1:
        d = (hi - lo) // 2
        m = 0
        for p in parts[lo:lo + d]:
            m |= p.mask
        t = a ^ m
        vt = f.eval_int(t)
        if vt != va:
            hi = lo + d
        else:
            a, va = t, vt
            lo += d
    return parts[lo], BitString(x.n, a)


# ---------------------------------------------------------------------------
# Literal orientation
# ---------------------------------------------------------------------------

_radii_cache: dict[int, np.ndarray] = {}


def orientation_cap(k: int) -> int:
    """Iteration ceiling ceil(128 * ln(64k))."""
    return int(math.ceil(128.0 * math.log(64.0 * k)))


def orientation_radii(k: int) -> np.ndarray:
    """Confidence radii r_i = sqrt(ln(64 k i^2) / (2 i)), i = 1..cap.

    Precomputed once per k so both kernel backends compare against identical
    floats.
    """
    radii = _radii_cache.get(k)
    if radii is None:
        cap = orientation_cap(k)
        i = np.arange(1, cap + 1, dtype=np.float64)
        radii = np.sqrt((np.log(64.0 * k) + 2.0 * np.log(i)) / (2.0 * i))
        radii.setflags(write=False)
        _radii_cache[k] = radii
    return radii


@dataclass(frozen=True)
class OrientationOutcome:
    verdict: str  # "first" | "second" | "fail"
    iterations_used: int
    queries: int
    witness_first: Optional[tuple[BitString, BitString]]
    witness_second: Optional[tuple[BitString, BitString]]

    def winning_witness(self) -> tuple[BitString, BitString]:
        w = self.witness_first if self.verdict == "first" else self.witness_second
        if w is None:
            raise ContractError("verdict without a disagreeing pair on the winning half")
        return w


def literal_orientation(
    f: FunctionOracle,
    z: BitString,
    half_a: Block,
    half_b: Block,
    k: int,
    rng: RandomSource,
) -> OrientationOutcome:
    """Decide which half of a bisected block carries the influence.

    Works on g(u) = f(u on the block, z elsewhere).  Each iteration samples
    one uniform pair flipped across each half and compares the running
    disagreement means; stops when they separate by twice the confidence
    radius.  Returns "fail" when the iteration budget runs out.
    """
    if not half_a.isdisjoint(half_b):
        raise ContractError("halves overlap")
    block_mask = half_a.mask | half_b.mask
    if block_mask == 0:
        raise ContractError("both halves empty")
    n = f.n
    radii = orientation_radii(k)
    verdict, iters, wit_a, has_a, wit_b, has_b, queries, counter = _orientation_kernel(
        f.descriptor, block_mask, z.value, n, half_a.mask, half_b.mask,
        radii, rng.key, rng.counter,
    )
    rng.counter = counter
    f.charge(queries)

    def _pair(w: int, half: Block, present: bool):
        if not present:
            return None
        ws = BitString(n, w)
        return (ws, flip(ws, half))

    names = {0: "fail", 1: "first", 2: "second"}
    return OrientationOutcome(
        verdict=names[verdict],
        iterations_used=iters,
        queries=queries,
        witness_first=_pair(wit_a, half_a, has_a),
        witness_second=_pair(wit_b, half_b, has_b),
    )


# ---------------------------------------------------------------------------
# Literal check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LiteralCheckOutcome:
    """accept, or a witnessed split into two disjoint relevant sub-blocks, or
    reject without a usable split (rare; the caller keeps the block whole)."""

    kind: str  # "accept" | "reject_split" | "reject_nosplit"
    part_a: Optional[Block] = None
    part_b: Optional[Block] = None
    witness: Optional[BitString] = None

    @property
    def accepted(self) -> bool:
        return self.kind == "accept"


def _double_witness(f: FunctionOracle, c: int, qa: int, qb: int) -> bool:
    vc = f.eval_int(c)
    return f.eval_int(c ^ qa) != vc and f.eval_int(c ^ qb) != vc


def _split_from_certificates(
    f: FunctionOracle, ujr, n: int
) -> Optional[tuple[Block, Block, BitString]]:
    """Try to fuse two junta-test certificates into one doubly-sensitive point.

    The certificates give disjoint sub-blocks qa, qb with individual
    witnesses; a string sensitive to both flips exists in many cases (always
    for parity-like restrictions) among the corners of either witness's
    rectangle over (qa, qb).
    """
    qa = ujr.certificates[0].mask
    qb = ujr.certificates[1].mask
    for base in (ujr.witnesses[0].value, ujr.witnesses[1].value):
        for corner in (base, base ^ qa, base ^ qb, base ^ qa ^ qb):
            if _double_witness(f, corner, qa, qb):
                return (
                    Block.from_mask(n, qa),
                    Block.from_mask(n, qb),
                    BitString(n, corner),
                )
    return None


def _split_search(
    f: FunctionOracle, z: BitString, block: Block, fz: int, rng: RandomSource,
    attempts: int,
) -> Optional[tuple[Block, Block, BitString]]:
    """Randomized hunt for a bisection of the block with one string sensitive
    to both half-flips; candidates per attempt: a fresh uniform point, its
    block-antipode, and the relevance witness."""
    n = f.n
    bmask = block.mask
    zout = z.value & ~bmask
    for _ in range(attempts):
        half_a, half_b = random_bisect(block, rng)
        if not half_a or not half_b:
            continue
        u = (rng.u64() & bmask) | zout
        vu = f.eval_int(u)
        vuA = f.eval_int(u ^ half_a.mask)
        vuB = f.eval_int(u ^ half_b.mask)
        if vuA != vu and vuB != vu:
            return half_a, half_b, BitString(n, u)
        vub = f.eval_int(u ^ bmask)
        if vuB != vub and vuA != vub:  # antipode: flips across halves swap
            return half_a, half_b, BitString(n, u ^ bmask)
        vzA = f.eval_int(z.value ^ half_a.mask)
        vzB = f.eval_int(z.value ^ half_b.mask)
        if vzA != fz and vzB != fz:
            return half_a, half_b, z
    return None


def is_literal(
    f: FunctionOracle,
    z: BitString,
    block: Block,
    k: int,
    rng: RandomSource,
    split_attempts: int = SPLIT_SEARCH_ATTEMPTS,
) -> LiteralCheckOutcome:
    """Check whether the block's restriction g(u) = f(u on block, z elsewhere)
    behaves like a single literal.

    Accepts every exact literal on every seed.  A restriction 1/8-far from
    all literals is caught with probability at least 1 - 1/(28k), either by
    the uniform junta test (whose certificates are fused into a witnessed
    split) or by the antipodal bisection checks.
    """
    if not block:
        raise ContractError("need a nonempty block")
    n = f.n
    fz = f.eval(z)
    fzB = f.eval_int(z.value ^ block.mask)
    if fz == fzB:
        raise ContractError("z does not witness the block's relevance")

    reps = max(1, (k - 1).bit_length())  # ceil(log2 k), at least one round
    for _ in range(reps):
        ujr = uniform_junta_test(f, 1, LITERAL_GAMMA, rng, free=block, base=z)
        if not ujr.accepted:
            split = _split_from_certificates(f, ujr, n)
            if split is None:
                split = _split_search(f, z, block, fz, rng, split_attempts)
            if split is None:
                return LiteralCheckOutcome(kind="reject_nosplit")
            a, b, w = split
            return LiteralCheckOutcome(kind="reject_split", part_a=a, part_b=b, witness=w)
        # A literal makes exactly one half-flip sensitive at every point, so
        # equal values on both flips that differ from the point reject it.
        half_a, half_b = random_bisect(block, rng)
        vA = f.eval_int(z.value ^ half_a.mask)
        vB = f.eval_int(z.value ^ half_b.mask)
        if vA == vB != fz:
            return LiteralCheckOutcome("reject_split", half_a, half_b, z)
        half_a2, half_b2 = random_bisect(block, rng)
        y = z.value ^ block.mask
        vA2 = f.eval_int(y ^ half_a2.mask)
        vB2 = f.eval_int(y ^ half_b2.mask)
        if vA2 == vB2 != fzB:
            return LiteralCheckOutcome("reject_split", half_a2, half_b2, BitString(n, y))
    return LiteralCheckOutcome(kind="accept")
