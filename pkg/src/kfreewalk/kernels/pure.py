"""Pure-Python (numpy vectorized) twins of the compiled kernels.

Every function here must produce bit-identical output to its twin in
``_compiled.pyx``: all three kernels are exact integer computations, so
equality is literal, not approximate.  The parity test suite asserts it.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def mobius_segment(lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Mobius values mu(n) for n in [lo, hi], as int8.

    ``primes`` must contain all primes <= isqrt(hi).  Classic segmented
    scheme: flip sign once per prime factor p <= isqrt(hi), zero out
    multiples of p^2, then flip once more where a cofactor > isqrt(hi)
    remains.
    """
    n = hi - lo + 1
    mu = np.ones(n, dtype=np.int8)
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p > hi:
            break
        start = ((lo + p - 1) // p) * p - lo
        mu[start::p] = -mu[start::p]
        rem[start::p] //= p
        p2 = p * p
        start2 = ((lo + p2 - 1) // p2) * p2 - lo
        if start2 < n:
            mu[start2::p2] = 0
    big = rem > 1
    mu[big] = -mu[big]
    return mu


def kfree_segment(lo: int, hi: int, k: int, primes: np.ndarray) -> np.ndarray:
    """k-free flags (1/0) for n in [lo, hi], as uint8.

    ``primes`` must contain all primes p with p^k <= hi.  Marks the
    multiples of each k-th prime power.
    """
    n = hi - lo + 1
    flags = np.ones(n, dtype=np.uint8)
    for p in primes:
        pk = int(p) ** k
        if pk > hi:
            break
        start = ((lo + pk - 1) // pk) * pk - lo
        flags[start::pk] = 0
    return flags


def walk_hits(trial_seed: int, threshold: int, n: int, a: int, b: int,
              start: int, flags: np.ndarray, flags_lo: int) -> int:
    """Count flagged positions along one walk of n steps.

    Step j (j = 1..n) draws u = fin64(trial_seed + j*GOLDEN) and moves
    +a if u < threshold else +b; the hit count sums flags[pos - flags_lo]
    over the n visited positions.  Integer-only, hence bit-reproducible.
    """
    j = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(trial_seed) + j * GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z ^= z >> np.uint64(31)
    steps = np.where(z < np.uint64(threshold), np.int64(a), np.int64(b))
    pos = np.cumsum(steps)
    pos += np.int64(start - flags_lo)
    return int(flags[pos].sum(dtype=np.int64))
