"""Pure-numpy kernel backend.

Batch work is vectorized; the rare sequential pieces (block binary search,
bookkeeping between certificates) run on plain Python integers.  Draws are
generated in bulk from the counter stream, but a kernel that stops early
reports only the ticks its executed iterations consumed, so the stream stays
aligned with the numba backend.
"""

from __future__ import annotations

import numpy as np

from ..rng import GOLDEN, MASK64, mix64
from .common import (
    DIST_EXPLICIT,
    DIST_PRODUCT,
    DIST_UNIFORM,
    KIND_CONJ,
    KIND_CONST,
    KIND_DICTATOR,
    KIND_EMBED,
    KIND_PARITY,
    KIND_TABLE,
    VERDICT_FAIL,
    VERDICT_FIRST,
    VERDICT_SECOND,
)

_U64 = np.uint64
_GOLD = _U64(GOLDEN)
_FLOAT_SCALE = 2.0 ** -53


def _ticks(key: int, counter: int, m: int) -> np.ndarray:
    """Ticks counter .. counter+m-1 of the stream, vectorized."""
    idx = _U64(counter + 1) + np.arange(m, dtype=np.uint64)
    z = _U64(key) + _GOLD * idx
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def _floats(words: np.ndarray) -> np.ndarray:
    return (words >> _U64(11)).astype(np.float64) * _FLOAT_SCALE


def eval_batch(fkind, fa, fb, ftable, fpos, xs: np.ndarray) -> np.ndarray:
    fa = _U64(fa)
    fb = _U64(fb)
    if fkind == KIND_CONST:
        return np.full(xs.shape, int(fa) & 1, dtype=np.uint8)
    if fkind == KIND_DICTATOR:
        return (((xs >> fa) & _U64(1)) ^ fb).astype(np.uint8)
    if fkind == KIND_PARITY:
        return (np.bitwise_count(xs & fa) & _U64(1)).astype(np.uint8)
    if fkind == KIND_CONJ:
        return ((xs & fa) == fb).astype(np.uint8)
    if fkind == KIND_TABLE:
        return ftable[xs]
    if fkind == KIND_EMBED:
        idx = np.zeros(xs.shape, dtype=np.uint64)
        for j in range(len(fpos)):
            idx |= ((xs >> _U64(fpos[j])) & _U64(1)) << _U64(j)
        return ftable[idx]
    raise ValueError(f"unknown function kind {fkind}")


def _eval_one(fkind, fa, fb, ftable, fpos, x: int) -> int:
    fa = int(fa)
    fb = int(fb)
    if fkind == KIND_CONST:
        return fa & 1
    if fkind == KIND_DICTATOR:
        return ((x >> fa) & 1) ^ fb
    if fkind == KIND_PARITY:
        return (x & fa).bit_count() & 1
    if fkind == KIND_CONJ:
        return 1 if (x & fa) == fb else 0
    if fkind == KIND_TABLE:
        return int(ftable[x])
    if fkind == KIND_EMBED:
        idx = 0
        for j in range(len(fpos)):
            idx |= ((x >> int(fpos[j])) & 1) << j
        return int(ftable[idx])
    raise ValueError(f"unknown function kind {fkind}")


def sample_batch(dkind, n, dprobs, dsupport, dcdf, key, counter, m):
    """m samples from the distribution; returns (encodings, new counter)."""
    nmask = _U64((1 << n) - 1)
    if dkind == DIST_UNIFORM:
        xs = _ticks(key, counter, m) & nmask
        return xs, counter + m
    if dkind == DIST_PRODUCT:
        u = _floats(_ticks(key, counter, m * n)).reshape(m, n)
        bits = (u < dprobs[None, :]).astype(np.uint64)
        xs = np.zeros(m, dtype=np.uint64)
        for i in range(n):
            xs |= bits[:, i] << _U64(i)
        return xs, counter + m * n
    if dkind == DIST_EXPLICIT:
        u = _floats(_ticks(key, counter, m))
        idx = np.minimum(np.searchsorted(dcdf, u, side="right"), len(dcdf) - 1)
        return dsupport[idx], counter + m
    raise ValueError(f"unknown distribution kind {dkind}")


def pair_rate(fkind, fa, fb, ftable, fpos,
              dkind, n, dprobs, dsupport, dcdf,
              free_mask, trials, key, counter):
    """Count of trials where f(x) != f(x ^ R), R a random subset of free_mask.

    Per trial: the sample's ticks, then one subset tick.  Returns
    (hits, queries, new counter).
    """
    d = n if dkind == DIST_PRODUCT else 1
    span = d + 1
    words = _ticks(key, counter, trials * span).reshape(trials, span)
    if dkind == DIST_UNIFORM:
        xs = words[:, 0] & _U64((1 << n) - 1)
    elif dkind == DIST_PRODUCT:
        u = _floats(words[:, :n].reshape(-1)).reshape(trials, n)
        bits = (u < dprobs[None, :]).astype(np.uint64)
        xs = np.zeros(trials, dtype=np.uint64)
        for i in range(n):
            xs |= bits[:, i] << _U64(i)
    else:
        u = _floats(words[:, 0])
        idx = np.minimum(np.searchsorted(dcdf, u, side="right"), len(dcdf) - 1)
        xs = dsupport[idx]
    rs = words[:, d] & _U64(free_mask)
    fx = eval_batch(fkind, fa, fb, ftable, fpos, xs)
    fy = eval_batch(fkind, fa, fb, ftable, fpos, xs ^ rs)
    hits = int(np.count_nonzero(fx != fy))
    return hits, 2 * trials, counter + trials * span


def _binsearch_parts(fdesc, a: int, left_val: int, parts: list[int]):
    """Halving search over disjoint flipped parts; returns (index, witness, queries).

    Precondition: f(a) = left_val != f(a ^ union(parts)).
    """
    fkind, fa, fb, ftable, fpos = fdesc
    lo, hi = 0, len(parts)  # active slice of parts
    queries = 0
    while hi - lo > 1:
        d = (hi - lo) // 2
        m = 0
        for p in parts[lo:lo + d]:
            m |= p
        t = a ^ m
        qt = _eval_one(fkind, fa, fb, ftable, fpos, t)
        queries += 1
        if qt != left_val:
            hi = lo + d  # disagreement inside the left half
        else:
            a, left_val = t, qt
            lo = lo + d
    return lo, a, queries


def uniform_junta(fkind, fa, fb, ftable, fpos,
                  free_mask, base, n, k, gamma, key, counter):
    """Random-partition junta test on g(u) = f(u on free_mask, base elsewhere).

    Each round redraws the coordinates outside the discovered parts; on a
    disagreement, a halving search over the per-part differing sub-blocks
    certifies one new relevant part.  Rejects once k+1 parts are certified.

    Returns (rejected, parts, certs, wits, queries, rounds_run, new counter):
    parts are the full partition parts marked discovered, certs the certified
    sub-blocks (cert ⊆ part), wits full strings with f(w) != f(w ^ cert).
    """
    fdesc = (fkind, fa, fb, ftable, fpos)
    free_mask = int(free_mask)
    base_out = int(base) & ~free_mask & ((1 << n) - 1)
    s = 24 * k * k
    coords = [i for i in range(n) if (free_mask >> i) & 1]
    part_masks = [0] * s
    if coords:
        words = _ticks(key, counter, len(coords))
        for j, c in enumerate(coords):
            part_masks[int(words[j]) % s] |= 1 << c
    counter += len(coords)

    rounds = int(np.ceil(32.0 * (k + 1) / gamma))
    words = _ticks(key, counter, 2 * rounds)
    disc = 0  # union of discovered parts
    found_parts: list[int] = []
    found_certs: list[int] = []
    found_wits: list[int] = []
    queries = 0
    rounds_run = 0
    j = 0
    while j < rounds:
        # vectorize the stretch of rounds sharing the current disc mask
        xw = words[2 * j::2][: rounds - j] & _U64(free_mask)
        ww = words[2 * j + 1::2][: rounds - j] & _U64(free_mask)
        xs = xw | _U64(base_out)
        ys = (xw & _U64(disc)) | (ww & _U64(free_mask & ~disc)) | _U64(base_out)
        vx = eval_batch(*fdesc, xs)
        vy = eval_batch(*fdesc, ys)
        hit = np.nonzero(vx != vy)[0]
        if hit.size == 0:
            queries += 2 * (rounds - j)
            rounds_run = rounds
            break
        h = int(hit[0])
        queries += 2 * (h + 1)
        rounds_run = j + h + 1
        x_full, y_full = int(xs[h]), int(ys[h])
        diff = x_full ^ y_full
        cand_parts = []
        cand_subs = []
        for p in part_masks:
            if p and (p & diff):
                cand_parts.append(p)
                cand_subs.append(p & diff)
        idx, wit, q = _binsearch_parts(fdesc, x_full, int(vx[h]), cand_subs)
        queries += q
        disc |= cand_parts[idx]
        found_parts.append(cand_parts[idx])
        found_certs.append(cand_subs[idx])
        found_wits.append(wit)
        if len(found_parts) > k:
            return (True, found_parts, found_certs, found_wits,
                    queries, rounds_run, counter + 2 * rounds_run)
        j = rounds_run
    else:
        rounds_run = rounds
    return (False, found_parts, found_certs, found_wits,
            queries, rounds_run, counter + 2 * rounds_run)


def orientation(fkind, fa, fb, ftable, fpos,
                block_mask, base, n, half_a, half_b, radii, key, counter):
    """Race the flip-disagreement rates of two halves of a block.

    g(u) = f(u on block_mask, base elsewhere).  Per iteration draws one pair
    flipped across half_a and one across half_b.  Stops when one empirical
    mean exceeds the other by twice the confidence radius from ``radii``.

    Returns (verdict, iters, wit_a, has_a, wit_b, has_b, queries, new counter)
    where wit_a is a full string with f(wit_a) != f(wit_a ^ half_a) (first
    disagreeing pair seen for that half), likewise wit_b.
    """
    fdesc = (fkind, fa, fb, ftable, fpos)
    block_mask = int(block_mask)
    base_out = int(base) & ~block_mask & ((1 << n) - 1)
    cap = len(radii)
    words = _ticks(key, counter, 2 * cap)
    wa = (words[0::2] & _U64(block_mask)) | _U64(base_out)
    wb = (words[1::2] & _U64(block_mask)) | _U64(base_out)
    sa = (eval_batch(*fdesc, wa) != eval_batch(*fdesc, wa ^ _U64(half_a))).astype(np.int64)
    sb = (eval_batch(*fdesc, wb) != eval_batch(*fdesc, wb ^ _U64(half_b))).astype(np.int64)
    ca = np.cumsum(sa)
    cb = np.cumsum(sb)
    iters = np.arange(1, cap + 1, dtype=np.float64)
    mua = ca / iters
    mub = cb / iters
    gap = 2.0 * radii
    a_wins = mua >= mub + gap
    b_wins = mub >= mua + gap
    stop = np.nonzero(a_wins | b_wins)[0]

    def _first_hit(flags: np.ndarray, upto: int) -> tuple[int, bool]:
        nz = np.nonzero(flags[:upto])[0]
        if nz.size == 0:
            return 0, False
        return int(nz[0]), True

    if stop.size == 0:
        i = cap
        verdict = VERDICT_FAIL
    else:
        i = int(stop[0]) + 1
        verdict = VERDICT_FIRST if a_wins[i - 1] else VERDICT_SECOND
    ia, has_a = _first_hit(sa, i)
    ib, has_b = _first_hit(sb, i)
    wit_a = int(wa[ia]) if has_a else 0
    wit_b = int(wb[ib]) if has_b else 0
    return verdict, i, wit_a, has_a, wit_b, has_b, 4 * i, counter + 2 * i


def pair_hunt(fkind, fa, fb, ftable, fpos,
              dkind, n, dprobs, dsupport, dcdf,
              flip_fixed, loose_masks, free_mask, budget, key, counter):
    """Probe for a disagreeing pair: x from the distribution, y = x with
    flip_fixed flipped, a fresh random subset of each loose mask flipped, and
    a fresh random subset of free_mask flipped.

    Returns (found, x, r0, t_subsets, iters_used, queries, new counter).
    """
    fdesc = (fkind, fa, fb, ftable, fpos)
    d = n if dkind == DIST_PRODUCT else 1
    nl = len(loose_masks)
    span = d + nl + 1
    words = _ticks(key, counter, budget * span).reshape(budget, span)
    if dkind == DIST_UNIFORM:
        xs = words[:, 0] & _U64((1 << n) - 1)
    elif dkind == DIST_PRODUCT:
        u = _floats(words[:, :n].reshape(-1)).reshape(budget, n)
        bits = (u < dprobs[None, :]).astype(np.uint64)
        xs = np.zeros(budget, dtype=np.uint64)
        for i in range(n):
            xs |= bits[:, i] << _U64(i)
    else:
        u = _floats(words[:, 0])
        idx = np.minimum(np.searchsorted(dcdf, u, side="right"), len(dcdf) - 1)
        xs = dsupport[idx]
    flips = np.full(budget, _U64(flip_fixed), dtype=np.uint64)
    tsub = np.zeros((budget, nl), dtype=np.uint64)
    for j in range(nl):
        tsub[:, j] = words[:, d + j] & _U64(loose_masks[j])
        flips |= tsub[:, j]
    r0 = words[:, d + nl] & _U64(free_mask)
    flips |= r0
    fx = eval_batch(*fdesc, xs)
    fy = eval_batch(*fdesc, xs ^ flips)
    hit = np.nonzero(fx != fy)[0]
    if hit.size == 0:
        return (False, 0, 0, np.zeros(nl, dtype=np.uint64), budget,
                2 * budget, counter + budget * span)
    h = int(hit[0])
    return (True, int(xs[h]), int(r0[h]), tsub[h].copy(), h + 1,
            2 * (h + 1), counter + (h + 1) * span)


def race_sim(p_a, p_b, cap, radii, keys):
    """Bernoulli-stream simulation of the orientation stopping rule.

    One run per key; returns (verdicts int8, iterations int64).
    """
    runs = len(keys)
    verdicts = np.zeros(runs, dtype=np.int8)
    iters = np.zeros(runs, dtype=np.int64)
    gap = 2.0 * radii
    steps = np.arange(1, cap + 1, dtype=np.float64)
    for r in range(runs):
        words = _ticks(int(keys[r]), 0, 2 * cap)
        u = _floats(words)
        sa = (u[0::2] < p_a).astype(np.int64)
        sb = (u[1::2] < p_b).astype(np.int64)
        mua = np.cumsum(sa) / steps
        mub = np.cumsum(sb) / steps
        a_wins = mua >= mub + gap
        b_wins = mub >= mua + gap
        stop = np.nonzero(a_wins | b_wins)[0]
        if stop.size == 0:
            verdicts[r] = VERDICT_FAIL
            iters[r] = cap
        else:
            i = int(stop[0])
            verdicts[r] = VERDICT_FIRST if a_wins[i] else VERDICT_SECOND
            iters[r] = i + 1
    return verdicts, iters


def kjunta_search(table, masses, n, subset_masks):
    """Minimum weighted disagreement with any function of a candidate
    coordinate subset; returns (best_error, best_subset_index).

    For each candidate subset J, the best completion answers the heavier of
    the two mass classes on every J-assignment, so the error is the sum of
    the lighter class masses.
    """
    size = 1 << n
    xs = np.arange(size, dtype=np.uint64)
    m1 = masses * table
    m0 = masses - m1
    best = np.inf
    best_idx = -1
    for j_idx in range(len(subset_masks)):
        jm = int(subset_masks[j_idx])
        proj = np.zeros(size, dtype=np.int64)
        rank = 0
        for b in range(n):
            if (jm >> b) & 1:
                proj |= (((xs >> _U64(b)) & _U64(1)) << _U64(rank)).astype(np.int64)
                rank += 1
        nb = 1 << rank
        acc1 = np.bincount(proj, weights=m1, minlength=nb)
        acc0 = np.bincount(proj, weights=m0, minlength=nb)
        err = float(np.minimum(acc0, acc1).sum())
        if err < best:
            best = err
            best_idx = j_idx
    return best, best_idx
