"""Sampling distributions over {0,1}^n: uniform, per-coordinate product, and
explicit finite-support, plus their file format and exact mass functions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .bits import BitString
from .errors import InvalidArgument, ResourceLimitError, SpecParseError
from .rng import RandomSource

_EMPTY_F8 = np.zeros(0, dtype=np.float64)
_EMPTY_U64 = np.zeros(0, dtype=np.uint64)

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Uniform:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument("need n >= 1")


@dataclass(frozen=True)
class Product:
    """Independent coordinates; probs[i-1] is P[coordinate i = 1]."""

    n: int
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if self.n < 1 or len(self.probs) != self.n:
            raise InvalidArgument("need one probability per coordinate")
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise InvalidArgument("probabilities must lie in [0,1]")


@dataclass(frozen=True, eq=False)
class Explicit:
    """Finite support with positive weights, normalized to sum 1."""

    n: int
    support: tuple[BitString, ...]
    weights: tuple[float, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 1 or not self.support:
            raise InvalidArgument("explicit distribution needs support strings")
        if any(s.n != self.n for s in self.support):
            raise InvalidArgument("support arity mismatch")
        if len({s.value for s in self.support}) != len(self.support):
            raise InvalidArgument("support strings must be distinct")
        w = self.weights
        if w is None:
            w = tuple(1.0 for _ in self.support)
        w = tuple(float(v) for v in w)
        if len(w) != len(self.support):
            raise InvalidArgument("need one weight per support string")
        if any(v <= 0 for v in w):
            raise InvalidArgument("weights must be positive")
        total = sum(w)
        w = tuple(v / total for v in w)
        if abs(sum(w) - 1.0) > _WEIGHT_TOL:
            raise InvalidArgument("weights failed to normalize")
        object.__setattr__(self, "weights", w)


DistributionSpec = Union[Uniform, Product, Explicit]


def descriptor(spec: DistributionSpec) -> tuple:
    """(kind, n, probs, support, cdf) for the kernel backends."""
    if isinstance(spec, Uniform):
        return (0, spec.n, _EMPTY_F8, _EMPTY_U64, _EMPTY_F8)
    if isinstance(spec, Product):
        return (1, spec.n, np.asarray(spec.probs, dtype=np.float64), _EMPTY_U64, _EMPTY_F8)
    if isinstance(spec, Explicit):
        support = np.asarray([s.value for s in spec.support], dtype=np.uint64)
        cdf = np.cumsum(np.asarray(spec.weights, dtype=np.float64))
        cdf[-1] = 1.0
        return (2, spec.n, _EMPTY_F8, support, cdf)
    raise InvalidArgument(f"not a DistributionSpec: {spec!r}")


def sample(spec: DistributionSpec, rng: RandomSource) -> BitString:
    """One draw; consumes the same ticks as the kernel backends (uniform and
    explicit: one tick, product: one tick per coordinate)."""
    if isinstance(spec, Uniform):
        return BitString(spec.n, rng.bits(spec.n))
    if isinstance(spec, Product):
        v = 0
        for i in range(spec.n):
            if rng.float53() < spec.probs[i]:
                v |= 1 << i
        return BitString(spec.n, v)
    if isinstance(spec, Explicit):
        u = rng.float53()
        cdf = descriptor(spec)[4]
        lo, hi = 0, len(cdf)
        while lo < hi:
            mid = (lo + hi) >> 1
            if u < cdf[mid]:
                hi = mid
            else:
                lo = mid + 1
        return spec.support[min(lo, len(cdf) - 1)]
    raise InvalidArgument(f"not a DistributionSpec: {spec!r}")


def mass(spec: DistributionSpec, x: BitString) -> float:
    """Exact probability of the string x."""
    if x.n != spec.n:
        raise InvalidArgument("mass: arity mismatch")
    if isinstance(spec, Uniform):
        return 0.5 ** spec.n
    if isinstance(spec, Product):
        p = 1.0
        for i in range(spec.n):
            pi = spec.probs[i]
            p *= pi if (x.value >> i) & 1 else 1.0 - pi
        return p
    if isinstance(spec, Explicit):
        for s, w in zip(spec.support, spec.weights):
            if s.value == x.value:
                return w
        return 0.0
    raise InvalidArgument(f"not a DistributionSpec: {spec!r}")


def mass_vector(spec: DistributionSpec, limit_n: int = 24) -> np.ndarray:
    """Masses of all 2**n strings, indexed by canonical encoding."""
    n = spec.n
    if n > limit_n:
        raise ResourceLimitError(f"mass vector for n={n} exceeds limit {limit_n}")
    size = 1 << n
    if isinstance(spec, Uniform):
        return np.full(size, 0.5 ** n)
    if isinstance(spec, Product):
        out = np.ones(size)
        xs = np.arange(size, dtype=np.uint64)
        for i in range(n):
            bit = ((xs >> np.uint64(i)) & np.uint64(1)).astype(bool)
            out *= np.where(bit, spec.probs[i], 1.0 - spec.probs[i])
        return out
    if isinstance(spec, Explicit):
        out = np.zeros(size)
        for s, w in zip(spec.support, spec.weights):
            out[s.value] = w
        return out
    raise InvalidArgument(f"not a DistributionSpec: {spec!r}")


# ---------------------------------------------------------------------------
# File format (first token picks the kind):
#     uniform <n>
#     product <n>      followed by one line of n probabilities
#     explicit <n>     followed by lines "<bitstring> <weight>"
# Bitstrings are written coordinate 1 first.  Weights normalize on load.
# ---------------------------------------------------------------------------

def format_distribution(spec: DistributionSpec) -> str:
    if isinstance(spec, Uniform):
        return f"uniform {spec.n}\n"
    if isinstance(spec, Product):
        return f"product {spec.n}\n" + " ".join(repr(p) for p in spec.probs) + "\n"
    if isinstance(spec, Explicit):
        lines = [f"explicit {spec.n}"]
        for s, w in zip(spec.support, spec.weights):
            lines.append(f"{s.text()} {w!r}")
        return "\n".join(lines) + "\n"
    raise InvalidArgument(f"not a DistributionSpec: {spec!r}")


def save_distribution(path, spec: DistributionSpec) -> None:
    with open(path, "w") as fh:
        fh.write(format_distribution(spec))


def parse_distribution(text: str) -> DistributionSpec:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SpecParseError("empty distribution file")
    head = lines[0].split()
    if len(head) != 2:
        raise SpecParseError(f"bad header line: {lines[0]!r}")
    kind, n_text = head
    try:
        n = int(n_text)
    except ValueError:
        raise SpecParseError(f"bad arity: {n_text!r}") from None
    if n < 1:
        raise SpecParseError("arity must be >= 1")
    try:
        if kind == "uniform":
            if len(lines) != 1:
                raise SpecParseError("trailing content after uniform header")
            return Uniform(n)
        if kind == "product":
            if len(lines) != 2:
                raise SpecParseError("product needs exactly one probability line")
            parts = lines[1].split()
            if len(parts) != n:
                raise SpecParseError(f"expected {n} probabilities, got {len(parts)}")
            return Product(n, tuple(float(p) for p in parts))
        if kind == "explicit":
            rows = lines[1:]
            if not rows:
                raise SpecParseError("explicit needs at least one support line")
            support = []
            weights = []
            for row in rows:
                parts = row.split()
                if len(parts) != 2:
                    raise SpecParseError(f"bad support line: {row!r}")
                s, w = parts
                if len(s) != n:
                    raise SpecParseError(f"support string {s!r} is not {n} bits")
                support.append(BitString.from_text(s))
                weights.append(float(w))
            return Explicit(n, tuple(support), tuple(weights))
    except (InvalidArgument, ValueError) as e:
        raise SpecParseError(str(e)) from None
    raise SpecParseError(f"unknown distribution kind {kind!r}")


def load_distribution_file(path) -> DistributionSpec:
    with open(path) as fh:
        return parse_distribution(fh.read())


def parse_dist_arg(text: str, n: int) -> DistributionSpec:
    """CLI form: 'uniform' | 'product:p1,p2,...' | a file path."""
    if text == "uniform":
        return Uniform(n)
    m = re.fullmatch(r"product:(.*)", text)
    if m:
        try:
            probs = tuple(float(p) for p in m.group(1).split(","))
        except ValueError:
            raise SpecParseError(f"bad product probabilities: {text!r}") from None
        if len(probs) == 1:
            probs = probs * n
        return Product(n, probs)
    spec = load_distribution_file(text)
    if spec.n != n:
        raise SpecParseError(f"distribution arity {spec.n} does not match function arity {n}")
    return spec
