"""Numba kernel backend: the same operations as numpy_impl, JIT-compiled.

Tick-for-tick and query-for-query identical to the numpy backend; the
equivalence suite asserts this on every kernel.  Mask-like scalars are
np.uint64; counters stay in uint64 arithmetic throughout (mixing int64 into
uint64 expressions would promote to float64 under numba's numpy rules).
"""

from __future__ import annotations

import numpy as np
from numba import njit

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

_JIT = dict(cache=True, nogil=True)

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U0 = np.uint64(0)
_U1 = np.uint64(1)
_FLOAT_SCALE = 2.0 ** -53


@njit(**_JIT)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(**_JIT)
def _word(key, c):
    # value of the c-th tick, 1-based multiplier as in rng.stream_at
    return _mix(key + _GOLD * c)


@njit(**_JIT)
def _f53(w):
    return np.float64(w >> np.uint64(11)) * _FLOAT_SCALE


@njit(**_JIT)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@njit(**_JIT)
def _eval(fkind, fa, fb, ftable, fpos, x):
    if fkind == KIND_CONST:
        return np.uint8(fa & _U1)
    if fkind == KIND_DICTATOR:
        return np.uint8(((x >> fa) & _U1) ^ fb)
    if fkind == KIND_PARITY:
        return np.uint8(_popcount(x & fa) & _U1)
    if fkind == KIND_CONJ:
        if (x & fa) == fb:
            return np.uint8(1)
        return np.uint8(0)
    if fkind == KIND_TABLE:
        return ftable[x]
    # KIND_EMBED
    idx = _U0
    for j in range(len(fpos)):
        idx |= ((x >> np.uint64(fpos[j])) & _U1) << np.uint64(j)
    return ftable[idx]


@njit(**_JIT)
def eval_batch(fkind, fa, fb, ftable, fpos, xs, out):
    for i in range(len(xs)):
        out[i] = _eval(fkind, fa, fb, ftable, fpos, xs[i])


@njit(**_JIT)
def _cdf_right(dcdf, u):
    lo = 0
    hi = len(dcdf)
    while lo < hi:
        mid = (lo + hi) >> 1
        if u < dcdf[mid]:
            hi = mid
        else:
            lo = mid + 1
    if lo > len(dcdf) - 1:
        lo = len(dcdf) - 1
    return lo


@njit(**_JIT)
def _sample(dkind, n, dprobs, dsupport, dcdf, nmask, key, c):
    """Draw one sample; returns (encoding, counter after)."""
    if dkind == DIST_UNIFORM:
        c += _U1
        return _word(key, c) & nmask, c
    if dkind == DIST_PRODUCT:
        x = _U0
        for i in range(n):
            c += _U1
            if _f53(_word(key, c)) < dprobs[i]:
                x |= _U1 << np.uint64(i)
        return x, c
    # DIST_EXPLICIT
    c += _U1
    u = _f53(_word(key, c))
    return dsupport[_cdf_right(dcdf, u)], c


@njit(**_JIT)
def sample_batch(dkind, n, dprobs, dsupport, dcdf, key, counter, out):
    c = counter
    nmask = (_U1 << np.uint64(n)) - _U1
    for i in range(len(out)):
        x, c = _sample(dkind, n, dprobs, dsupport, dcdf, nmask, key, c)
        out[i] = x
    return c


@njit(**_JIT)
def pair_rate(fkind, fa, fb, ftable, fpos,
              dkind, n, dprobs, dsupport, dcdf,
              free_mask, trials, key, counter):
    c = counter
    nmask = (_U1 << np.uint64(n)) - _U1
    hits = 0
    for _ in range(trials):
        x, c = _sample(dkind, n, dprobs, dsupport, dcdf, nmask, key, c)
        c += _U1
        r = _word(key, c) & free_mask
        if _eval(fkind, fa, fb, ftable, fpos, x) != _eval(fkind, fa, fb, ftable, fpos, x ^ r):
            hits += 1
    return hits, 2 * trials, c


@njit(**_JIT)
def _binsearch_parts(fkind, fa, fb, ftable, fpos, a, left_val, subs, lo, hi):
    """Halving search over disjoint flipped sub-blocks subs[lo:hi].

    Precondition: f(a) = left_val differs from f(a ^ union(subs[lo:hi])).
    Returns (found index, witness string, queries).
    """
    queries = 0
    while hi - lo > 1:
        d = (hi - lo) // 2
        m = _U0
        for t in range(lo, lo + d):
            m |= subs[t]
        t2 = a ^ m
        qt = _eval(fkind, fa, fb, ftable, fpos, t2)
        queries += 1
        if qt != left_val:
            hi = lo + d
        else:
            a = t2
            left_val = qt
            lo = lo + d
    return lo, a, queries


@njit(**_JIT)
def uniform_junta(fkind, fa, fb, ftable, fpos,
                  free_mask, base, n, k, gamma, key, counter,
                  parts_out, certs_out, wits_out):
    c = counter
    nmask = (_U1 << np.uint64(n)) - _U1
    base_out = base & ~free_mask & nmask
    s = 24 * k * k
    part_masks = np.zeros(s, dtype=np.uint64)
    for i in range(n):
        if (free_mask >> np.uint64(i)) & _U1:
            c += _U1
            p = _word(key, c) % np.uint64(s)
            part_masks[p] |= _U1 << np.uint64(i)

    rounds = int(np.ceil(32.0 * (k + 1) / gamma))
    disc = _U0
    nfound = 0
    queries = 0
    rounds_run = 0
    cand_parts = np.zeros(s, dtype=np.uint64)
    cand_subs = np.zeros(s, dtype=np.uint64)
    for _ in range(rounds):
        c += _U1
        xw = _word(key, c) & free_mask
        c += _U1
        ww = _word(key, c) & free_mask
        x = xw | base_out
        y = (xw & disc) | (ww & free_mask & ~disc) | base_out
        rounds_run += 1
        vx = _eval(fkind, fa, fb, ftable, fpos, x)
        vy = _eval(fkind, fa, fb, ftable, fpos, y)
        queries += 2
        if vx != vy:
            diff = x ^ y
            m = 0
            for t in range(s):
                p = part_masks[t]
                if p != _U0 and (p & diff) != _U0:
                    cand_parts[m] = p
                    cand_subs[m] = p & diff
                    m += 1
            idx, wit, q = _binsearch_parts(
                fkind, fa, fb, ftable, fpos, x, vx, cand_subs, 0, m
            )
            queries += q
            disc |= cand_parts[idx]
            parts_out[nfound] = cand_parts[idx]
            certs_out[nfound] = cand_subs[idx]
            wits_out[nfound] = wit
            nfound += 1
            if nfound > k:
                return 1, nfound, queries, rounds_run, c
    return 0, nfound, queries, rounds_run, c


@njit(**_JIT)
def orientation(fkind, fa, fb, ftable, fpos,
                block_mask, base, n, half_a, half_b, radii, key, counter):
    c = counter
    nmask = (_U1 << np.uint64(n)) - _U1
    base_out = base & ~block_mask & nmask
    cap = len(radii)
    suma = 0
    sumb = 0
    wit_a = _U0
    wit_b = _U0
    has_a = False
    has_b = False
    verdict = VERDICT_FAIL
    i = 0
    while i < cap:
        i += 1
        c += _U1
        wa = (_word(key, c) & block_mask) | base_out
        if _eval(fkind, fa, fb, ftable, fpos, wa) != _eval(fkind, fa, fb, ftable, fpos, wa ^ half_a):
            suma += 1
            if not has_a:
                wit_a = wa
                has_a = True
        c += _U1
        wb = (_word(key, c) & block_mask) | base_out
        if _eval(fkind, fa, fb, ftable, fpos, wb) != _eval(fkind, fa, fb, ftable, fpos, wb ^ half_b):
            sumb += 1
            if not has_b:
                wit_b = wb
                has_b = True
        mua = suma / np.float64(i)
        mub = sumb / np.float64(i)
        gap = 2.0 * radii[i - 1]
        if mua >= mub + gap:
            verdict = VERDICT_FIRST
            break
        if mub >= mua + gap:
            verdict = VERDICT_SECOND
            break
    return verdict, i, wit_a, has_a, wit_b, has_b, 4 * i, c


@njit(**_JIT)
def pair_hunt(fkind, fa, fb, ftable, fpos,
              dkind, n, dprobs, dsupport, dcdf,
              flip_fixed, loose_masks, free_mask, budget, key, counter,
              t_out):
    c = counter
    nmask = (_U1 << np.uint64(n)) - _U1
    nl = len(loose_masks)
    iters = 0
    for _ in range(budget):
        iters += 1
        x, c = _sample(dkind, n, dprobs, dsupport, dcdf, nmask, key, c)
        flips = flip_fixed
        for j in range(nl):
            c += _U1
            t_out[j] = _word(key, c) & loose_masks[j]
            flips |= t_out[j]
        c += _U1
        r0 = _word(key, c) & free_mask
        flips |= r0
        if _eval(fkind, fa, fb, ftable, fpos, x) != _eval(fkind, fa, fb, ftable, fpos, x ^ flips):
            return 1, x, r0, iters, 2 * iters, c
    return 0, _U0, _U0, iters, 2 * iters, c


@njit(**_JIT)
def race_sim(p_a, p_b, cap, radii, keys, verdicts_out, iters_out):
    for r in range(len(keys)):
        key = keys[r]
        c = _U0
        suma = 0
        sumb = 0
        verdict = VERDICT_FAIL
        i = 0
        while i < cap:
            i += 1
            c += _U1
            if _f53(_word(key, c)) < p_a:
                suma += 1
            c += _U1
            if _f53(_word(key, c)) < p_b:
                sumb += 1
            mua = suma / np.float64(i)
            mub = sumb / np.float64(i)
            gap = 2.0 * radii[i - 1]
            if mua >= mub + gap:
                verdict = VERDICT_FIRST
                break
            if mub >= mua + gap:
                verdict = VERDICT_SECOND
                break
        verdicts_out[r] = verdict
        iters_out[r] = i


@njit(**_JIT)
def kjunta_search(table, masses, n, subset_masks):
    size = 1 << n
    best = np.inf
    best_idx = -1
    nbmax = 1 << n
    acc0 = np.zeros(nbmax, dtype=np.float64)
    acc1 = np.zeros(nbmax, dtype=np.float64)
    for j_idx in range(len(subset_masks)):
        jm = subset_masks[j_idx]
        rank = 0
        for b in range(n):
            if (jm >> np.uint64(b)) & _U1:
                rank += 1
        nb = 1 << rank
        for t in range(nb):
            acc0[t] = 0.0
            acc1[t] = 0.0
        for x in range(size):
            pidx = 0
            rr = 0
            for b in range(n):
                if (jm >> np.uint64(b)) & _U1:
                    pidx |= ((x >> b) & 1) << rr
                    rr += 1
            w = masses[x]
            if table[x]:
                acc1[pidx] += w
            else:
                acc0[pidx] += w
        err = 0.0
        for t in range(nb):
            if acc0[t] < acc1[t]:
                err += acc0[t]
            else:
                err += acc1[t]
        if err < best:
            best = err
            best_idx = j_idx
    return best, best_idx
