"""The two distribution-free junta testers and the pair-rate estimator.

Both testers grow a collection of pairwise-disjoint relevant blocks, each
carrying a re-verifiable witness (two queries show the block's flip changes
f).  Since disjoint witnessed blocks pin distinct relevant variables, a
collection of k+1 blocks is proof that f is no k-junta: rejects are
certificate-backed and a k-junta is accepted on every seed.

The literal-based tester vets each new block's restriction against a single
literal, orients the bisected block around that literal, and keeps the
oriented halves cached so older blocks are never re-oriented.  The simpler
tester skips literal machinery entirely: each block is bisected once into a
certified half (kept fixed) and a loose half, and every probe re-flips a
fresh random subset of each loose half.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import distributions as dists
from ._kernels import pair_hunt as _pair_hunt_kernel
from ._kernels import pair_rate as _pair_rate_kernel
from .bits import BitString, Block, BlockPartition, flip, random_bisect, random_subset
from .distributions import DistributionSpec, descriptor, sample
from .errors import ContractError, InvalidArgument
from .oracle import FunctionOracle
from .rng import RandomSource
from .subroutines import block_binary_search, is_literal, literal_orientation

OUTER_FACTOR = 42
INNER_NUMERATOR = 6.0

MAX_TESTER_N = 64  # kernel masks are 64-bit words


@dataclass
class BlockOrientation:
    """Which half of a block stays fixed when probing, with the witness that
    certifies the kept half's relevance."""

    keep: Block
    reversed_half: Block
    keep_witness: BitString


@dataclass
class RelevantBlockRecord:
    block: Block
    witness: BitString
    witness_value: int  # f(witness), cached when the certificate is verified
    orientation: Optional[BlockOrientation] = None
    literal_checked: bool = False

    def certificate(self) -> tuple[BitString, Block]:
        return self.witness, self.block


@dataclass
class TestReport:
    outcome: str  # "accept" | "reject"
    total_queries: int
    queries_by_subroutine: dict[str, int]
    blocks: list[RelevantBlockRecord]
    outer_iterations_used: int
    seed: int
    isliteral_calls: int = 0
    orientation_calls: int = 0
    orientation_fails: int = 0
    nosplit_events: int = 0
    progress_events: int = 0

    @property
    def rejected(self) -> bool:
        return self.outcome == "reject"


def inner_budget(epsilon: float) -> int:
    return int(math.ceil(INNER_NUMERATOR / epsilon))


def estimate_pair_rate(
    f: FunctionOracle,
    D: DistributionSpec,
    fixed: Block,
    trials: int,
    rng: RandomSource,
) -> float:
    """Monte-Carlo frequency of f(x) != f(x ^ R) with x from D and R a fresh
    uniform subset of the coordinates outside ``fixed``."""
    if D.n != f.n or fixed.universe_n != f.n:
        raise InvalidArgument("arity mismatch")
    if trials < 1:
        raise InvalidArgument("need at least one trial")
    free_mask = fixed.complement().mask
    hits, queries, counter = _pair_rate_kernel(
        f.descriptor, descriptor(D), free_mask, trials, rng.key, rng.counter
    )
    rng.counter = counter
    f.charge(queries)
    return hits / trials


def construct_pair(
    f: FunctionOracle,
    D: DistributionSpec,
    records: list[RelevantBlockRecord],
    rng: RandomSource,
) -> tuple[BitString, BitString, BlockPartition]:
    """Draw x from D and build the probe y: every stored block's reversed
    half flips, plus a fresh random subset of the coordinates outside all
    blocks.  Returns (x, y, the flipped blocks for a later binary search)."""
    n = f.n
    blocks_mask = 0
    flip_mask = 0
    parts: list[Block] = []
    for rec in records:
        if rec.orientation is None:
            raise ContractError("every record needs an orientation before probing")
        blocks_mask |= rec.block.mask
        half = rec.orientation.reversed_half
        flip_mask |= half.mask
        if half:
            parts.append(half)
    x = sample(D, rng)
    remainder = Block.from_mask(n, ((1 << n) - 1) & ~blocks_mask)
    r = random_subset(remainder, rng)
    if r:
        parts.append(r)
    y = BitString(n, x.value ^ flip_mask ^ r.mask)
    return x, y, BlockPartition(n, parts)


class _RunState:
    """Shared bookkeeping for one tester run."""

    def __init__(self, f: FunctionOracle, D: DistributionSpec, k: int,
                 epsilon: float, rng: RandomSource):
        if k < 1:
            raise InvalidArgument("need k >= 1")
        if not 0.0 < epsilon <= 1.0:
            raise InvalidArgument("need 0 < epsilon <= 1")
        if f.n != D.n:
            raise InvalidArgument("function and distribution arity mismatch")
        if f.n > MAX_TESTER_N:
            raise InvalidArgument(f"testers support n <= {MAX_TESTER_N}")
        self.f = f
        self.D = D
        self.ddesc = descriptor(D)
        self.k = k
        self.rng = rng
        self.n = f.n
        self.inner = inner_budget(epsilon)
        self.records: list[RelevantBlockRecord] = []
        self.qmap = {"f": 0, "isliteral": 0, "orientation": 0, "binsearch": 0}
        self.report = TestReport(
            outcome="accept", total_queries=0, queries_by_subroutine=self.qmap,
            blocks=self.records, outer_iterations_used=0, seed=rng.seed,
        )
        self._q_at_start = f.query_count

    def verified_record(self, block: Block, witness: BitString) -> RelevantBlockRecord:
        """Create a record, re-verifying its certificate with two queries."""
        q0 = self.f.query_count
        vw = self.f.eval(witness)
        vflip = self.f.eval_int(witness.value ^ block.mask)
        self.qmap["f"] += self.f.query_count - q0
        if vw == vflip:
            raise ContractError("certificate failed verification: block is not witnessed")
        for rec in self.records:
            if rec.block.mask & block.mask:
                raise ContractError("new block overlaps a stored block")
        return RelevantBlockRecord(block=block, witness=witness, witness_value=vw)

    def finish(self, outcome: str, outer_used: int) -> TestReport:
        self.report.outcome = outcome
        self.report.outer_iterations_used = outer_used
        self.report.total_queries = self.f.query_count - self._q_at_start
        return self.report

    def hunt(self, flip_fixed: int, loose: list[int], budget: int):
        """Run up to ``budget`` probes through the kernel; returns the kernel
        tuple and charges queries to the probe bucket."""
        blocks_mask = 0
        for rec in self.records:
            blocks_mask |= rec.block.mask
        free_mask = ((1 << self.n) - 1) & ~blocks_mask
        found, xv, r0, tsub, iters, queries, counter = _pair_hunt_kernel(
            self.f.descriptor, self.ddesc, flip_fixed, loose, free_mask,
            budget, self.rng.key, self.rng.counter,
        )
        self.rng.counter = counter
        self.f.charge(queries)
        self.qmap["f"] += queries
        return found, xv, r0, tsub, iters

    def search_parts(self, xv: int, parts: list[tuple[Optional[int], Block]]):
        """Binary-search the flipped parts; returns (record index or None, z)."""
        n = self.n
        union = 0
        for _, p in parts:
            union |= p.mask
        x = BitString(n, xv)
        y = BitString(n, xv ^ union)
        q0 = self.f.query_count
        found, z = block_binary_search(
            self.f, x, y, BlockPartition(n, [p for _, p in parts])
        )
        self.qmap["binsearch"] += self.f.query_count - q0
        for idx, p in parts:
            if p.mask == found.mask:
                return idx, z
        raise ContractError("binary search returned a block that was not offered")


def distribution_free_junta_test(
    f: FunctionOracle,
    D: DistributionSpec,
    k: int,
    epsilon: float,
    rng: RandomSource,
) -> TestReport:
    """Literal-based distribution-free junta tester.

    Outer loop (42k iterations): vet newly created blocks' restrictions
    against single literals; rejected blocks split into two witnessed
    sub-blocks.  Inner loop (ceil(6/epsilon) iterations): orient any block
    lacking a cached orientation (a failed orientation consumes the
    iteration), then probe with x from D against y that reverses the
    non-literal halves and a random subset outside all blocks; a disagreeing
    probe is binary-searched into either a brand-new block or a split of a
    stored one.  Reject as soon as k+1 blocks exist.
    """
    st = _RunState(f, D, k, epsilon, rng)
    rep = st.report
    outer_used = 0
    for _ in range(OUTER_FACTOR * k):
        outer_used += 1
        progressed = False
        nosplit_seen = False
        for idx, rec in enumerate(st.records):
            if rec.literal_checked:
                continue
            q0 = f.query_count
            out = is_literal(f, rec.witness, rec.block, k, rng)
            st.qmap["isliteral"] += f.query_count - q0
            rep.isliteral_calls += 1
            if out.kind == "accept":
                rec.literal_checked = True
                continue
            if out.kind == "reject_nosplit":
                rep.nosplit_events += 1
                nosplit_seen = True
                continue
            rec_a = st.verified_record(out.part_a, out.witness)
            rec_b = st.verified_record(out.part_b, out.witness)
            st.records[idx:idx + 1] = [rec_a, rec_b]
            rep.progress_events += 1
            progressed = True
            break
        if progressed:
            if len(st.records) > k:
                return st.finish("reject", outer_used)
            continue
        if nosplit_seen:
            continue  # the block stays whole; retry its literal check next round

        j = 0
        while j < st.inner:
            oriented_all = True
            for rec in st.records:
                if rec.orientation is not None:
                    continue
                half_a, half_b = random_bisect(rec.block, rng)
                q0 = f.query_count
                out = literal_orientation(f, rec.witness, half_a, half_b, k, rng)
                st.qmap["orientation"] += f.query_count - q0
                rep.orientation_calls += 1
                if out.verdict == "fail":
                    rep.orientation_fails += 1
                    oriented_all = False
                    break
                keep, rev = (half_a, half_b) if out.verdict == "first" else (half_b, half_a)
                wpair = out.winning_witness()
                rec.orientation = BlockOrientation(keep, rev, wpair[0])
            if not oriented_all:
                j += 1  # a failed orientation consumes one probe iteration
                continue

            flip_fixed = 0
            for rec in st.records:
                flip_fixed |= rec.orientation.reversed_half.mask
            found, xv, r0, _, iters = st.hunt(flip_fixed, [], st.inner - j)
            j += iters
            if not found:
                break
            parts: list[tuple[Optional[int], Block]] = []
            for ridx, rec in enumerate(st.records):
                half = rec.orientation.reversed_half
                if half:
                    parts.append((ridx, half))
            r0_block = Block.from_mask(st.n, r0)
            if r0_block:
                parts.append((None, r0_block))
            which, z = st.search_parts(xv, parts)
            if which is None:
                st.records.append(st.verified_record(r0_block, z))
            else:
                rec = st.records[which]
                o = rec.orientation
                rec_keep = st_replace_keep(st, o)
                rec_new = st.verified_record(o.reversed_half, z)
                st.records[which:which + 1] = [rec_keep, rec_new]
            rep.progress_events += 1
            if len(st.records) > k:
                return st.finish("reject", outer_used)
            break  # progress: restart the outer loop
    return st.finish("accept", outer_used)


def st_replace_keep(st: _RunState, o: BlockOrientation) -> RelevantBlockRecord:
    """Record for the kept half of a split block, certified by the
    orientation's stored disagreeing pair."""
    return st.verified_record(o.keep, o.keep_witness)


def simple_junta_test(
    f: FunctionOracle,
    D: DistributionSpec,
    k: int,
    epsilon: float,
    rng: RandomSource,
) -> TestReport:
    """Binary-search-based distribution-free junta tester.

    Every new block is immediately bisected once; one query identifies the
    certified-relevant half, which stays fixed from then on.  Each probe
    flips a fresh random subset of every block's loose half plus a random
    subset of the remainder; a disagreement is binary-searched into a new
    block or a split of a stored one.
    """
    st = _RunState(f, D, k, epsilon, rng)
    rep = st.report

    def bisect_once(rec: RelevantBlockRecord) -> None:
        half_a, half_b = random_bisect(rec.block, rng)
        q0 = f.query_count
        v = f.eval_int(rec.witness.value ^ half_a.mask)
        st.qmap["binsearch"] += f.query_count - q0
        if v != rec.witness_value:
            keep, rev = half_a, half_b
            kw = rec.witness
        else:
            # f(z ^ a) = f(z) != f(z ^ block), so the other half is certified
            keep, rev = half_b, half_a
            kw = BitString(st.n, rec.witness.value ^ half_a.mask)
        rec.orientation = BlockOrientation(keep, rev, kw)

    outer_used = 0
    for _ in range(OUTER_FACTOR * k):
        outer_used += 1
        j = 0
        progressed = False
        while j < st.inner:
            loose = [rec.orientation.reversed_half.mask for rec in st.records]
            found, xv, r0, tsub, iters = st.hunt(0, loose, st.inner - j)
            j += iters
            if not found:
                break
            parts: list[tuple[Optional[int], Block]] = []
            for ridx, t in enumerate(tsub):
                if t:
                    parts.append((ridx, Block.from_mask(st.n, t)))
            r0_block = Block.from_mask(st.n, r0)
            if r0_block:
                parts.append((None, r0_block))
            which, z = st.search_parts(xv, parts)
            if which is None:
                rec_new = st.verified_record(r0_block, z)
                st.records.append(rec_new)
                bisect_once(rec_new)
            else:
                rec = st.records[which]
                o = rec.orientation
                flipped = Block.from_mask(st.n, tsub[which])
                rec_keep = st.verified_record(o.keep, o.keep_witness)
                rec_new = st.verified_record(flipped, z)
                # the unflipped loose remainder returns to the open pool
                st.records[which:which + 1] = [rec_keep, rec_new]
                bisect_once(rec_keep)
                bisect_once(rec_new)
            rep.progress_events += 1
            progressed = True
            break
        if progressed:
            if len(st.records) > k:
                return st.finish("reject", outer_used)
            continue
    return st.finish("accept", outer_used)
