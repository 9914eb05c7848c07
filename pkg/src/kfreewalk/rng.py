"""Counter-based 64-bit random number generator.

All simulation randomness is derived from one pinned algorithm so that
results are reproducible across runs, machines, worker counts and
backends (compiled or pure).

Generator
---------
The core primitive is the splitmix64 finalizer ``fin64``:

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

(all arithmetic mod 2**64).  A stream seeded at ``s`` produces

    u_j = fin64(s + (j + 1) * GOLDEN),       j = 0, 1, 2, ...

with GOLDEN = 0x9E3779B97F4A7C15, i.e. the j-th output is a pure
function of (s, j): any subsequence can be generated independently,
which is what makes parallel trial execution deterministic.

Seed derivation is two-level: trial t of a batch with master seed m
uses the stream seeded at ``mix64(m, t)``, and nested experiments
(e.g. one batch per grid point) derive their batch seeds the same way.
"""

from __future__ import annotations

from fractions import Fraction

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def fin64(z: int) -> int:
    """splitmix64 avalanche finalizer (mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def mix64(seed: int, t: int) -> int:
    """Derive sub-stream seed t from a master seed.

    Equals the t-th output of the splitmix64 sequence seeded at ``seed``.
    """
    return fin64((seed + (t + 1) * GOLDEN) & MASK64)


def uniform64(seed: int, j: int) -> int:
    """j-th 64-bit output of the stream seeded at ``seed`` (j >= 0)."""
    return fin64((seed + (j + 1) * GOLDEN) & MASK64)


def alpha_threshold(alpha: float) -> int:
    """Integer threshold T with u < T  <=>  u / 2**64 < alpha.

    T = floor(alpha * 2**64), computed exactly.  Sampling ``step_a iff
    uniform64 < T`` realises a Bernoulli(T / 2**64) draw whose bias
    against the real alpha is below 2**-64.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    t = int(Fraction(alpha) * (1 << 64))
    return t
