"""Kernel backend selection and the uniform calling surface.

Two interchangeable backends implement the hot loops: ``numba_impl``
(JIT-compiled, the default when numba imports) and ``numpy_impl``
(vectorized pure numpy).  Select with the environment variable
``JUNTATEST_BACKEND=numba|numpy`` before import, or programmatically with
:func:`set_backend`.  Outputs are bit-identical across backends; the test
suite asserts it.

Callers pass descriptor tuples prepared by :mod:`..oracle` and
:mod:`..distributions`:

* function: ``(kind, fa, fb, table, positions)``
* distribution: ``(kind, n, probs, support, cdf)``

and plain-int masks/counters; wrappers here handle dtype conversion.
"""

from __future__ import annotations

import os

import numpy as np

from . import numpy_impl

try:
    from . import numba_impl
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_impl = None

_U64 = np.uint64


def _pick_default() -> str:
    env = os.environ.get("JUNTATEST_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "numba" if numba_impl is not None else "numpy"
    if env not in ("numba", "numpy"):
        raise ValueError(f"JUNTATEST_BACKEND must be numba|numpy, got {env!r}")
    if env == "numba" and numba_impl is None:
        raise ImportError("JUNTATEST_BACKEND=numba but numba is not importable")
    return env


_backend_name = _pick_default()


def set_backend(name: str) -> None:
    """Switch the active backend ('numba' or 'numpy') for subsequent calls."""
    global _backend_name
    if name not in ("numba", "numpy"):
        raise ValueError("backend must be 'numba' or 'numpy'")
    if name == "numba" and numba_impl is None:
        raise ImportError("numba backend requested but numba is not importable")
    _backend_name = name


def get_backend() -> str:
    return _backend_name


def _f(fdesc):
    kind, fa, fb, table, pos = fdesc
    return int(kind), _U64(fa), _U64(fb), table, pos


def eval_batch(fdesc, xs: np.ndarray) -> np.ndarray:
    kind, fa, fb, table, pos = _f(fdesc)
    if _backend_name == "numpy":
        return numpy_impl.eval_batch(kind, fa, fb, table, pos, xs)
    out = np.empty(len(xs), dtype=np.uint8)
    numba_impl.eval_batch(kind, fa, fb, table, pos, xs, out)
    return out


def sample_batch(ddesc, key: int, counter: int, m: int):
    dkind, n, probs, support, cdf = ddesc
    if _backend_name == "numpy":
        xs, c = numpy_impl.sample_batch(dkind, n, probs, support, cdf, key, counter, m)
        return xs, int(c)
    out = np.empty(m, dtype=np.uint64)
    c = numba_impl.sample_batch(dkind, n, probs, support, cdf, _U64(key), _U64(counter), out)
    return out, int(c)


def pair_rate(fdesc, ddesc, free_mask: int, trials: int, key: int, counter: int):
    kind, fa, fb, table, pos = _f(fdesc)
    dkind, n, probs, support, cdf = ddesc
    if _backend_name == "numpy":
        hits, queries, c = numpy_impl.pair_rate(
            kind, fa, fb, table, pos, dkind, n, probs, support, cdf,
            _U64(free_mask), trials, key, counter,
        )
    else:
        hits, queries, c = numba_impl.pair_rate(
            kind, fa, fb, table, pos, dkind, n, probs, support, cdf,
            _U64(free_mask), trials, _U64(key), _U64(counter),
        )
    return int(hits), int(queries), int(c)


def uniform_junta(fdesc, free_mask: int, base: int, n: int, k: int,
                  gamma: float, key: int, counter: int):
    """Returns (rejected, parts, certs, wits, queries, rounds_run, counter)."""
    kind, fa, fb, table, pos = _f(fdesc)
    if _backend_name == "numpy":
        rejected, parts, certs, wits, queries, rounds_run, c = numpy_impl.uniform_junta(
            kind, fa, fb, table, pos, _U64(free_mask), _U64(base), n, k, gamma,
            key, counter,
        )
        return (bool(rejected), [int(p) for p in parts], [int(q) for q in certs],
                [int(w) for w in wits], int(queries), int(rounds_run), int(c))
    parts_out = np.zeros(k + 1, dtype=np.uint64)
    certs_out = np.zeros(k + 1, dtype=np.uint64)
    wits_out = np.zeros(k + 1, dtype=np.uint64)
    rejected, nfound, queries, rounds_run, c = numba_impl.uniform_junta(
        kind, fa, fb, table, pos, _U64(free_mask), _U64(base), n, k, gamma,
        _U64(key), _U64(counter), parts_out, certs_out, wits_out,
    )
    return (bool(rejected), [int(p) for p in parts_out[:nfound]],
            [int(q) for q in certs_out[:nfound]], [int(w) for w in wits_out[:nfound]],
            int(queries), int(rounds_run), int(c))


def orientation(fdesc, block_mask: int, base: int, n: int,
                half_a: int, half_b: int, radii: np.ndarray,
                key: int, counter: int):
    """Returns (verdict, iters, wit_a, has_a, wit_b, has_b, queries, counter)."""
    kind, fa, fb, table, pos = _f(fdesc)
    if _backend_name == "numpy":
        out = numpy_impl.orientation(
            kind, fa, fb, table, pos, _U64(block_mask), _U64(base), n,
            _U64(half_a), _U64(half_b), radii, key, counter,
        )
    else:
        out = numba_impl.orientation(
            kind, fa, fb, table, pos, _U64(block_mask), _U64(base), n,
            _U64(half_a), _U64(half_b), radii, _U64(key), _U64(counter),
        )
    verdict, iters, wit_a, has_a, wit_b, has_b, queries, c = out
    return (int(verdict), int(iters), int(wit_a), bool(has_a), int(wit_b),
            bool(has_b), int(queries), int(c))


def pair_hunt(fdesc, ddesc, flip_fixed: int, loose_masks, free_mask: int,
              budget: int, key: int, counter: int):
    """Returns (found, x, r0, t_subsets, iters, queries, counter)."""
    kind, fa, fb, table, pos = _f(fdesc)
    dkind, n, probs, support, cdf = ddesc
    lm = np.asarray([int(m) for m in loose_masks], dtype=np.uint64)
    if _backend_name == "numpy":
        found, x, r0, tsub, iters, queries, c = numpy_impl.pair_hunt(
            kind, fa, fb, table, pos, dkind, n, probs, support, cdf,
            _U64(flip_fixed), lm, _U64(free_mask), budget, key, counter,
        )
    else:
        t_out = np.zeros(len(lm), dtype=np.uint64)
        found, x, r0, iters, queries, c = numba_impl.pair_hunt(
            kind, fa, fb, table, pos, dkind, n, probs, support, cdf,
            _U64(flip_fixed), lm, _U64(free_mask), budget, _U64(key), _U64(counter),
            t_out,
        )
        tsub = t_out
    return (bool(found), int(x), int(r0), [int(t) for t in tsub],
            int(iters), int(queries), int(c))


def race_sim(p_a: float, p_b: float, cap: int, radii: np.ndarray, keys: np.ndarray):
    """Returns (verdicts int8 array, iterations int64 array)."""
    if _backend_name == "numpy":
        return numpy_impl.race_sim(p_a, p_b, cap, radii, keys)
    verdicts = np.zeros(len(keys), dtype=np.int8)
    iters = np.zeros(len(keys), dtype=np.int64)
    numba_impl.race_sim(p_a, p_b, cap, radii, keys, verdicts, iters)
    return verdicts, iters


def kjunta_search(table: np.ndarray, masses: np.ndarray, n: int,
                  subset_masks: np.ndarray):
    """Returns (best_error, best_subset_index)."""
    if _backend_name == "numpy":
        best, idx = numpy_impl.kjunta_search(table, masses, n, subset_masks)
    else:
        best, idx = numba_impl.kjunta_search(table, masses, n, subset_masks)
    return float(best), int(idx)
