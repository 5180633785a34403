"""Exact brute-force reference oracles over small n.

These make the probabilistic quantities the testers rely on exactly
computable: distances to junta/literal/constant classes, the resample
disagreement probability, relevant-variable sets, and a searcher for
counterexamples to subadditivity of the resample probability under a
non-uniform sampling distribution.  Ground truth for the statistical tests;
not built for large n.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import distributions as dist_mod
from ._kernels import kjunta_search
from .bits import BitString, Block
from .distributions import DistributionSpec, Explicit, Product, Uniform, mass_vector
from .errors import InvalidArgument, ResourceLimitError
from .functions import Constant, Embedded, FunctionSpec, TruthTable, materialize_function
from .oracle import FunctionOracle
from .rng import RandomSource

DEFAULT_ENUM_BUDGET = 1 << 28


@dataclass(frozen=True)
class JuntaWitness:
    """Relevant set plus the optimal completion table (indexed by the
    ascending-coordinate bits of the relevant set)."""

    junta: Block
    completion: np.ndarray

    def as_spec(self) -> FunctionSpec:
        members = self.junta.members
        if not members:
            return Constant(self.junta.universe_n, int(self.completion[0]))
        inner = TruthTable(len(members), self.completion)
        return Embedded(self.junta.universe_n, inner, members)


@dataclass(frozen=True)
class LiteralWitness:
    n: int
    i: int
    negated: bool

    def as_spec(self) -> FunctionSpec:
        from .functions import Dictator

        return Dictator(self.n, self.i, self.negated)


@dataclass(frozen=True)
class ConstantWitness:
    n: int
    value: int

    def as_spec(self) -> FunctionSpec:
        return Constant(self.n, self.value)


Witness = Union[JuntaWitness, LiteralWitness, ConstantWitness]


@dataclass(frozen=True)
class DistanceReport:
    distance: float
    witness: Witness

    def witness_oracle(self) -> FunctionOracle:
        return materialize_function(self.witness.as_spec())


def relevant_variables(f: FunctionOracle, limit_n: int = 24) -> Block:
    """Exactly the coordinates whose flip changes f somewhere."""
    if f.n > limit_n:
        raise ResourceLimitError(f"relevant_variables at n={f.n} exceeds limit {limit_n}")
    t = f.table(limit_n).reshape((2,) * f.n)
    members = []
    for i in range(1, f.n + 1):
        axis = f.n - i
        if np.any(t.take(0, axis=axis) != t.take(1, axis=axis)):
            members.append(i)
    return Block(f.n, members)


def exact_dist(f: FunctionOracle, g: FunctionOracle, D: DistributionSpec,
               limit_n: int = 20) -> float:
    """P_{x ~ D}[f(x) != g(x)], summed exactly over the cube."""
    if f.n != g.n or f.n != D.n:
        raise InvalidArgument("exact_dist: arity mismatch")
    if f.n > limit_n:
        raise ResourceLimitError(f"exact_dist at n={f.n} exceeds limit {limit_n}")
    masses = mass_vector(D)
    return float(masses[f.table(limit_n) != g.table(limit_n)].sum())


def _projection(n: int, jmask: int) -> np.ndarray:
    xs = np.arange(1 << n, dtype=np.uint64)
    proj = np.zeros(1 << n, dtype=np.int64)
    rank = 0
    for b in range(n):
        if (jmask >> b) & 1:
            proj |= (((xs >> np.uint64(b)) & np.uint64(1)) << np.uint64(rank)).astype(np.int64)
            rank += 1
    return proj


def exact_dist_to_k_junta(f: FunctionOracle, D: DistributionSpec, k: int,
                          budget: int = DEFAULT_ENUM_BUDGET) -> DistanceReport:
    """Minimum distance from f to any function of at most k coordinates.

    Enumerates every k-subset; for each assignment to the subset the optimal
    completion answers with the heavier mass class (ties resolved to 0).
    """
    n = f.n
    if D.n != n:
        raise InvalidArgument("arity mismatch")
    if not 0 <= k <= n:
        raise InvalidArgument("need 0 <= k <= n")
    import math

    n_subsets = math.comb(n, k)
    if n_subsets * (1 << n) > budget:
        raise ResourceLimitError(
            f"C({n},{k}) * 2^{n} = {n_subsets * (1 << n)} exceeds budget {budget}"
        )
    table = f.table()
    masses = mass_vector(D)
    subset_masks = np.asarray(
        [sum(1 << b for b in combo) for combo in itertools.combinations(range(n), k)],
        dtype=np.uint64,
    )
    _, best_idx = kjunta_search(table, masses, n, subset_masks)
    jmask = int(subset_masks[best_idx])
    members = tuple(b + 1 for b in range(n) if (jmask >> b) & 1)
    proj = _projection(n, jmask)
    m1 = masses * table
    m0 = masses - m1
    nb = 1 << len(members)
    acc1 = np.bincount(proj, weights=m1, minlength=nb)
    acc0 = np.bincount(proj, weights=m0, minlength=nb)
    completion = (acc1 > acc0).astype(np.uint8)
    witness = JuntaWitness(Block(n, members), completion)
    distance = exact_dist(f, materialize_function(witness.as_spec()), D)
    return DistanceReport(distance, witness)


@dataclass(frozen=True)
class LiteralDistanceReport:
    """Distance to the nearest literal and to the nearest constant, under the
    uniform distribution, reported separately."""

    literal: DistanceReport
    constant: DistanceReport


def exact_dist_to_literal(g: FunctionOracle, limit_n: int = 20) -> LiteralDistanceReport:
    if g.n > limit_n:
        raise ResourceLimitError(f"exact_dist_to_literal at n={g.n} exceeds limit {limit_n}")
    n = g.n
    table = g.table(limit_n)
    size = 1 << n
    xs = np.arange(size, dtype=np.uint64)
    best_lit = None
    for i in range(1, n + 1):
        bit = ((xs >> np.uint64(i - 1)) & np.uint64(1)).astype(np.uint8)
        d_pos = float(np.count_nonzero(table != bit)) / size
        for negated, d in ((False, d_pos), (True, 1.0 - d_pos)):
            if best_lit is None or d < best_lit[0]:
                best_lit = (d, i, negated)
    ones = float(np.count_nonzero(table)) / size
    if ones <= 1.0 - ones:
        best_const = (ones, 0)
    else:
        best_const = (1.0 - ones, 1)
    return LiteralDistanceReport(
        literal=DistanceReport(best_lit[0], LiteralWitness(n, best_lit[1], best_lit[2])),
        constant=DistanceReport(best_const[0], ConstantWitness(n, best_const[1])),
    )


def exact_V(f: FunctionOracle, S: DistributionSpec, F: DistributionSpec,
            fixed: Block, limit_n: int = 20) -> float:
    """P[f(x) != f(y)] where x ~ S and y keeps x on ``fixed`` and redraws the
    rest from F.  Exact in O(n * 2^n)."""
    n = f.n
    if S.n != n or F.n != n or fixed.universe_n != n:
        raise InvalidArgument("exact_V: arity mismatch")
    if n > limit_n:
        raise ResourceLimitError(f"exact_V at n={n} exceeds limit {limit_n}")
    table = f.table(limit_n)
    size = 1 << n
    imask = fixed.mask

    if isinstance(F, Explicit):
        xs = np.arange(size, dtype=np.uint64)
        q1 = np.zeros(size)
        for s, w in zip(F.support, F.weights):
            q1 += w * table[(xs & np.uint64(imask)) | np.uint64(s.value & ~imask)]
    else:
        q1 = table.astype(np.float64)
        for i in range(1, n + 1):
            if (imask >> (i - 1)) & 1:
                continue
            p = 0.5 if isinstance(F, Uniform) else F.probs[i - 1]
            view = q1.reshape(-1, 2, 1 << (i - 1))
            avg = (1.0 - p) * view[:, 0, :] + p * view[:, 1, :]
            view[:, 0, :] = avg
            view[:, 1, :] = avg
    mass_s = mass_vector(S)
    disagree = np.where(table == 1, 1.0 - q1, q1)
    return float(np.dot(mass_s, disagree))


def exact_V_randomized(f: FunctionOracle, S: DistributionSpec, F: DistributionSpec,
                       randomized: Block, limit_n: int = 20) -> float:
    """Convenience wrapper naming the redrawn set instead of the fixed set."""
    return exact_V(f, S, F, randomized.complement(), limit_n)


def find_subadditivity_violation(
    n: int,
    budget: int,
    rng: RandomSource,
    uniform_only: bool = False,
    disjoint_only: bool = False,
) -> Optional[tuple[FunctionSpec, DistributionSpec, Block, Block]]:
    """Search for f, D, J, K with
    V[redraw J∪K] > V[redraw J] + V[redraw K]
    where x ~ D and the redraw is uniform.  Returns a certified violating
    tuple or None after ``budget`` candidates.

    With uniform_only the sampling distribution is pinned to uniform (no
    violation should exist); disjoint_only restricts to disjoint J, K.
    """
    if n > 4:
        raise ResourceLimitError("subadditivity search is a desk-scale tool; need n <= 4")
    size = 1 << n
    full = (1 << size) - 1
    uniform = Uniform(n)
    for _ in range(budget):
        fv = rng.bits(size)
        if fv == 0 or fv == full:
            continue  # constants can never violate
        table = np.zeros(size, dtype=np.uint8)
        for j in range(size):
            table[j] = (fv >> j) & 1
        fspec = TruthTable(n, table)
        if uniform_only:
            D: DistributionSpec = uniform
        else:
            a = rng.bits(n)
            b = rng.bits(n)
            if a == b:
                continue
            D = Explicit(n, (BitString(n, a), BitString(n, b)), (0.5, 0.5))
        jm = rng.bits(n)
        km = rng.bits(n)
        if disjoint_only:
            km &= ~jm
        if jm == 0 or km == 0:
            continue
        f = materialize_function(fspec)
        J = Block.from_mask(n, jm)
        K = Block.from_mask(n, km)
        JK = Block.from_mask(n, jm | km)
        v_union = exact_V_randomized(f, D, uniform, JK)
        v_j = exact_V_randomized(f, D, uniform, J)
        v_k = exact_V_randomized(f, D, uniform, K)
        if v_union > v_j + v_k + 1e-9:
            return fspec, D, J, K
    return None
