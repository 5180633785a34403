"""Shared constants and argument conventions for the kernel backends.

Both backends implement the same operations on the same flat argument
layout and must be bit-for-bit interchangeable:

Function descriptor (``fkind, fa, fb, ftable, fpos``):
    ========  ==========================  ==========================
    fkind     fa                          fb
    ========  ==========================  ==========================
    CONST     output value (0/1)          --
    DICTATOR  bit position (coord - 1)    1 if negated
    PARITY    support mask                --
    CONJ      support mask                pattern of positive bits
    TABLE     --                          --   (ftable: 2**n entries)
    EMBED     --                          --   (ftable + fpos: bit positions)
    ========  ==========================  ==========================

Distribution descriptor (``dkind, n, dprobs, dsupport, dcdf``):
    UNIFORM   -- / PRODUCT: dprobs per-coordinate one-probabilities /
    EXPLICIT: dsupport encodings with cumulative weights dcdf (last entry 1.0).

Randomness is the shared splitmix64 counter stream (see ``..rng``).  Tick
budgets per logical draw are fixed so the backends stay in lockstep:

* uniform sample: 1 tick; product sample: n ticks (coordinate order);
  explicit sample: 1 tick (CDF right-bisection of float53).
* random subset of a mask: 1 tick.
* equipartition into s parts: 1 tick per member, ascending coordinates,
  part index = tick % s.

Kernels that stop early report the counter advanced only by the ticks of the
iterations actually executed.
"""

KIND_CONST = 0
KIND_DICTATOR = 1
KIND_PARITY = 2
KIND_CONJ = 3
KIND_TABLE = 4
KIND_EMBED = 5

DIST_UNIFORM = 0
DIST_PRODUCT = 1
DIST_EXPLICIT = 2

VERDICT_FAIL = 0
VERDICT_FIRST = 1
VERDICT_SECOND = 2
