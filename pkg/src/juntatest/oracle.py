"""Query-counted black-box access to a Boolean function.

A FunctionOracle is the only way the testers touch a function.  It wraps an
encoded descriptor (see ``_kernels.common``) so the hot loops can run inside
the accelerated kernels; kernel-side queries are charged back onto the same
counter via :meth:`FunctionOracle.charge`.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ._kernels import eval_batch
from .bits import BitString
from .errors import InvalidArgument, ResourceLimitError

_EMPTY_TABLE = np.zeros(0, dtype=np.uint8)
_EMPTY_POS = np.zeros(0, dtype=np.int64)


class FunctionOracle:
    """Deterministic Boolean function with a monotone query counter."""

    __slots__ = ("n", "_desc", "_queries")

    def __init__(self, n: int, desc: tuple):
        if n < 1:
            raise InvalidArgument("oracle needs n >= 1")
        self.n = n
        self._desc = desc
        self._queries = 0

    @property
    def descriptor(self) -> tuple:
        """(kind, fa, fb, table, positions) for the kernel backends."""
        return self._desc

    @property
    def query_count(self) -> int:
        return self._queries

    def eval(self, x: BitString) -> int:
        if x.n != self.n:
            raise InvalidArgument("query arity mismatch")
        return self.eval_int(x.value)

    def eval_int(self, xv: int) -> int:
        """Query by canonical integer encoding; counts one query."""
        self._queries += 1
        kind, fa, fb, table, pos = self._desc
        if kind == 0:  # constant
            return fa & 1
        if kind == 1:  # dictator
            return ((xv >> fa) & 1) ^ fb
        if kind == 2:  # parity
            return (xv & fa).bit_count() & 1
        if kind == 3:  # conjunction
            return 1 if (xv & fa) == fb else 0
        if kind == 4:  # table
            return int(table[xv])
        idx = 0  # embedded table
        for j in range(len(pos)):
            idx |= ((xv >> int(pos[j])) & 1) << j
        return int(table[idx])

    def charge(self, m: int) -> None:
        """Account for m queries made through the descriptor by a kernel."""
        if m < 0:
            raise InvalidArgument("cannot uncharge queries")
        self._queries += m

    def clone(self) -> "FunctionOracle":
        """Same function, fresh counter (descriptor arrays are shared read-only)."""
        return FunctionOracle(self.n, self._desc)

    def table(self, limit_n: int = 24) -> np.ndarray:
        """Dense truth table over all 2**n encodings, uncounted.

        Reference-path accessor for the exact oracles; bypasses the query
        counter by design.
        """
        if self.n > limit_n:
            raise ResourceLimitError(f"truth table for n={self.n} exceeds limit {limit_n}")
        xs = np.arange(1 << self.n, dtype=np.uint64)
        return eval_batch(self._desc, xs)

    def __repr__(self) -> str:  # pragma: no cover
        return f"FunctionOracle(n={self.n}, kind={self._desc[0]}, queries={self._queries})"


def oracle_from_table(n: int, table: np.ndarray) -> FunctionOracle:
    if len(table) != 1 << n:
        raise InvalidArgument("table length must be 2**n")
    t = np.ascontiguousarray(table, dtype=np.uint8)
    if ((t != 0) & (t != 1)).any():
        raise InvalidArgument("table entries must be 0 or 1")
    return FunctionOracle(n, (4, 0, 0, t, _EMPTY_POS))


def oracle_from_callable(n: int, fn: Callable[[BitString], int], limit_n: int = 20) -> FunctionOracle:
    """Materialize an arbitrary callable into a table-backed oracle.

    The callable is evaluated on all 2**n inputs once, so the testers can use
    the kernel path afterwards.
    """
    if n > limit_n:
        raise ResourceLimitError(f"cannot materialize a callable with n={n} > {limit_n}")
    table = np.zeros(1 << n, dtype=np.uint8)
    for v in range(1 << n):
        r = fn(BitString(n, v))
        if r not in (0, 1):
            raise InvalidArgument("callable must return 0 or 1")
        table[v] = r
    return oracle_from_table(n, table)
