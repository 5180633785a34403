"""Built-in Boolean function families, the truth-table file format, and the
family mini-language used by the command line.

Families cover the classes the testers are exercised on: single coordinates
(dictators), parities, conjunctions with signs, constants, explicit truth
tables, and embeddings of a small core function into a larger coordinate
space.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .bits import Block
from .errors import InvalidArgument, SpecParseError
from .oracle import FunctionOracle, _EMPTY_POS, _EMPTY_TABLE, oracle_from_table


@dataclass(frozen=True)
class Parity:
    n: int
    support: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(sorted(set(self.support))))
        _check_coords(self.n, self.support, "parity support")


@dataclass(frozen=True)
class Dictator:
    n: int
    i: int
    negated: bool = False

    def __post_init__(self):
        _check_coords(self.n, (self.i,), "dictator coordinate")


@dataclass(frozen=True)
class Constant:
    n: int
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise InvalidArgument("constant value must be 0 or 1")


@dataclass(frozen=True)
class Conjunction:
    """AND of literals: coordinate i appears positive iff i is in signs."""

    n: int
    support: tuple[int, ...]
    signs: tuple[int, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(sorted(set(self.support))))
        signs = self.support if self.signs is None else tuple(sorted(set(self.signs)))
        object.__setattr__(self, "signs", signs)
        _check_coords(self.n, self.support, "conjunction support")
        if not set(self.signs) <= set(self.support):
            raise InvalidArgument("signs must be a subset of the support")
        if not self.support:
            raise InvalidArgument("conjunction needs nonempty support")


@dataclass(frozen=True, eq=False)
class TruthTable:
    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.ascontiguousarray(self.table, dtype=np.uint8)
        if len(t) != 1 << self.n:
            raise InvalidArgument("table length must be 2**n")
        if ((t != 0) & (t != 1)).any():
            raise InvalidArgument("table entries must be 0 or 1")
        object.__setattr__(self, "table", t)


@dataclass(frozen=True)
class Embedded:
    """A core function on m coordinates placed into n >= m coordinates.

    ``injection[j-1]`` is the outer coordinate carrying inner coordinate j.
    """

    n: int
    inner: "FunctionSpec"
    injection: tuple[int, ...]

    def __post_init__(self):
        inj = tuple(self.injection)
        object.__setattr__(self, "injection", inj)
        if len(inj) != self.inner.n:
            raise InvalidArgument("injection length must equal inner arity")
        if len(set(inj)) != len(inj):
            raise InvalidArgument("injection must be injective")
        _check_coords(self.n, inj, "embedding injection")


FunctionSpec = Union[Parity, Dictator, Constant, Conjunction, TruthTable, Embedded]


def _check_coords(n, coords, what):
    if n < 1:
        raise InvalidArgument(f"{what}: n must be >= 1")
    for i in coords:
        if not 1 <= i <= n:
            raise InvalidArgument(f"{what}: coordinate {i} outside 1..{n}")


def _mask(coords) -> int:
    m = 0
    for i in coords:
        m |= 1 << (i - 1)
    return m


def _remap(spec: FunctionSpec, n: int, inj: tuple[int, ...]) -> FunctionSpec:
    """Push an embedding into the core family when the core is not a table."""
    def move(coords):
        return tuple(inj[i - 1] for i in coords)

    if isinstance(spec, Parity):
        return Parity(n, move(spec.support))
    if isinstance(spec, Dictator):
        return Dictator(n, inj[spec.i - 1], spec.negated)
    if isinstance(spec, Constant):
        return Constant(n, spec.value)
    if isinstance(spec, Conjunction):
        return Conjunction(n, move(spec.support), move(spec.signs))
    if isinstance(spec, Embedded):
        composed = tuple(inj[j - 1] for j in spec.injection)
        return _remap_or_embed(spec.inner, n, composed)
    return Embedded(n, spec, inj)  # TruthTable core


def _remap_or_embed(spec: FunctionSpec, n: int, inj: tuple[int, ...]) -> FunctionSpec:
    out = _remap(spec, n, inj)
    return out


def materialize_function(spec: FunctionSpec) -> FunctionOracle:
    """Build a query-counted oracle realizing the spec's semantics exactly."""
    if isinstance(spec, Embedded):
        spec = _remap_or_embed(spec.inner, spec.n, spec.injection)
    if isinstance(spec, Constant):
        return FunctionOracle(spec.n, (0, spec.value, 0, _EMPTY_TABLE, _EMPTY_POS))
    if isinstance(spec, Dictator):
        return FunctionOracle(spec.n, (1, spec.i - 1, int(spec.negated), _EMPTY_TABLE, _EMPTY_POS))
    if isinstance(spec, Parity):
        return FunctionOracle(spec.n, (2, _mask(spec.support), 0, _EMPTY_TABLE, _EMPTY_POS))
    if isinstance(spec, Conjunction):
        return FunctionOracle(spec.n, (3, _mask(spec.support), _mask(spec.signs), _EMPTY_TABLE, _EMPTY_POS))
    if isinstance(spec, TruthTable):
        return oracle_from_table(spec.n, spec.table)
    if isinstance(spec, Embedded):  # table core
        pos = np.asarray([i - 1 for i in spec.injection], dtype=np.int64)
        inner = spec.inner
        assert isinstance(inner, TruthTable)
        return FunctionOracle(spec.n, (5, 0, 0, inner.table, pos))
    raise InvalidArgument(f"not a FunctionSpec: {spec!r}")


def relevant_support(spec: FunctionSpec) -> Block:
    """Nominal support of a family (coordinates the definition mentions)."""
    if isinstance(spec, Embedded):
        spec = _remap_or_embed(spec.inner, spec.n, spec.injection)
    if isinstance(spec, Parity):
        return Block(spec.n, spec.support)
    if isinstance(spec, Dictator):
        return Block(spec.n, (spec.i,))
    if isinstance(spec, Constant):
        return Block(spec.n, ())
    if isinstance(spec, Conjunction):
        return Block(spec.n, spec.support)
    if isinstance(spec, TruthTable):
        return Block.full(spec.n)
    if isinstance(spec, Embedded):
        return Block(spec.n, spec.injection)
    raise InvalidArgument(f"not a FunctionSpec: {spec!r}")


# ---------------------------------------------------------------------------
# Truth-table file format:
#     n=<int>
#     table=<hex>
# The hex digits, most significant first and zero-padded, encode one bit per
# input: bit j of the value is f at the string with canonical encoding j.
# ---------------------------------------------------------------------------

def format_truth_table(spec: TruthTable) -> str:
    v = 0
    for j in range(1 << spec.n):
        v |= int(spec.table[j]) << j
    digits = max(1, (1 << spec.n) // 4 + (1 if (1 << spec.n) % 4 else 0))
    return f"n={spec.n}\ntable={v:0{digits}x}\n"


def save_truth_table(path, spec: TruthTable) -> None:
    with open(path, "w") as fh:
        fh.write(format_truth_table(spec))


def parse_truth_table(text: str) -> TruthTable:
    lines = [ln for ln in text.splitlines()]
    stripped = [ln.strip() for ln in lines if ln.strip()]
    if len(stripped) != 2:
        raise SpecParseError("truth-table file must have exactly two lines: n=..., table=...")
    m = re.fullmatch(r"n=(\d+)", stripped[0])
    if not m:
        raise SpecParseError(f"bad arity line: {stripped[0]!r}")
    n = int(m.group(1))
    if n < 1 or n > 24:
        raise SpecParseError(f"arity {n} outside 1..24")
    m = re.fullmatch(r"table=([0-9a-fA-F]+)", stripped[1])
    if not m:
        raise SpecParseError(f"bad table line: {stripped[1]!r}")
    hexdigits = m.group(1)
    want = max(1, (1 << n) // 4 + (1 if (1 << n) % 4 else 0))
    if len(hexdigits) != want:
        raise SpecParseError(f"table has {len(hexdigits)} hex digits, expected {want}")
    v = int(hexdigits, 16)
    if v >> (1 << n):
        raise SpecParseError("table value has bits beyond 2**n")
    table = np.zeros(1 << n, dtype=np.uint8)
    for j in range(1 << n):
        table[j] = (v >> j) & 1
    return TruthTable(n, table)


def load_function_file(path) -> TruthTable:
    with open(path) as fh:
        return parse_truth_table(fh.read())


# ---------------------------------------------------------------------------
# Family mini-language for the CLI: name:key=value,key=value
# Coordinate sets: "3", "1..4", or "1+3+7".
# ---------------------------------------------------------------------------

def _parse_coord_set(text: str) -> tuple[int, ...]:
    text = text.strip()
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if m:
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi < lo:
            raise SpecParseError(f"empty coordinate range {text!r}")
        return tuple(range(lo, hi + 1))
    parts = text.split("+")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise SpecParseError(f"bad coordinate set {text!r}") from None


def parse_family(text: str) -> FunctionSpec:
    """Parse a family string such as ``parity:n=24,support=1..4``."""
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    params: dict[str, str] = {}
    if rest:
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise SpecParseError(f"bad family parameter {item!r}")
            params[key.strip()] = val.strip()

    def need(key):
        if key not in params:
            raise SpecParseError(f"family {name!r} needs parameter {key!r}")
        return params.pop(key)

    def done():
        if params:
            raise SpecParseError(f"unknown parameters for {name!r}: {sorted(params)}")

    try:
        if name == "parity":
            n = int(need("n"))
            support = _parse_coord_set(need("support"))
            done()
            return Parity(n, support)
        if name == "dictator":
            n = int(need("n"))
            i = int(need("i"))
            neg = params.pop("negated", "0")
            done()
            return Dictator(n, i, negated=neg not in ("0", "false", ""))
        if name == "constant":
            n = int(need("n"))
            v = int(need("value"))
            done()
            return Constant(n, v)
        if name == "conjunction":
            n = int(need("n"))
            support = _parse_coord_set(need("support"))
            signs = _parse_coord_set(params.pop("signs")) if "signs" in params else None
            done()
            return Conjunction(n, support, signs)
    except InvalidArgument as e:
        raise SpecParseError(str(e)) from None
    raise SpecParseError(f"unknown family {name!r}")
