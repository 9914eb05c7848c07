"""Number-theoretic primitives: gcd, Mobius and k-free sieves, zeta.

All sieves are segmented (default segment 2**16 entries, cache-resident)
and pure functions of their inputs; tables are immutable after
construction.  Inputs above 2**62 are rejected so that p^k arithmetic
stays inside 64 bits.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from . import kernels

MAX_SIEVE_INPUT = 1 << 62
DEFAULT_SEGMENT = 1 << 16


def gcd(m: int, n: int) -> int:
    """gcd(m, n) for m, n >= 0, not both zero.  gcd(0, n) = n."""
    if m == 0 and n == 0:
        raise ValueError("gcd(0, 0) is undefined")
    return math.gcd(m, n)


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) by Newton iteration on integers (exact).

    Never goes through floating point, so perfect k-th powers land on
    the boundary instead of one off it.
    """
    if n < 0 or k < 1:
        raise ValueError("iroot requires n >= 0, k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << (-(-n.bit_length() // k))  # 2^ceil(bits/k) >= true root
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    return x


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n (int64 array), plain Eratosthenes."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if is_p[p]:
            is_p[p * p:: p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


@dataclass(frozen=True, eq=False)
class SieveTable:
    """Sieved values over an integer interval [lo, hi].

    values[n - lo] is mu(n) (kind="mobius", values in {-1,0,1}) or the
    k-free indicator of n (kind="kfree", values in {0,1}).
    """
    lo: int
    hi: int
    values: np.ndarray
    kind: Literal["mobius", "kfree"]
    k: Optional[int] = None

    def __post_init__(self):
        if len(self.values) != self.hi - self.lo + 1:
            raise ValueError("values length must equal hi - lo + 1")
        self.values.setflags(write=False)

    def value_at(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"{n} outside sieved range [{self.lo}, {self.hi}]")
        return int(self.values[n - self.lo])


@dataclass(frozen=True)
class CertifiedValue:
    """A value plus a rigorous absolute bound on its truncation error."""
    value: float
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")

    def contains(self, x: float) -> bool:
        return self.value - self.tail_bound <= x <= self.value + self.tail_bound


def _check_range(lo: int, hi: int) -> None:
    if not 1 <= lo <= hi:
        raise ValueError(f"need 1 <= lo <= hi, got [{lo}, {hi}]")
    if hi > MAX_SIEVE_INPUT:
        raise ValueError(f"inputs above 2^62 are rejected (got hi={hi})")


def mobius_sieve(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT) -> SieveTable:
    """Table of mu(n) for n in [lo, hi], sieved in fixed-size segments."""
    _check_range(lo, hi)
    primes = primes_up_to(math.isqrt(hi))
    parts = []
    for seg_lo in range(lo, hi + 1, segment_size):
        seg_hi = min(seg_lo + segment_size - 1, hi)
        parts.append(kernels.mobius_segment(seg_lo, seg_hi, primes))
    return SieveTable(lo, hi, np.concatenate(parts), "mobius")


def kfree_sieve(lo: int, hi: int, k: int, segment_size: int = DEFAULT_SEGMENT) -> SieveTable:
    """Table of k-free indicators for n in [lo, hi]."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    _check_range(lo, hi)
    primes = primes_up_to(iroot(hi, k))
    parts = []
    for seg_lo in range(lo, hi + 1, segment_size):
        seg_hi = min(seg_lo + segment_size - 1, hi)
        parts.append(kernels.kfree_segment(seg_lo, seg_hi, k, primes))
    return SieveTable(lo, hi, np.concatenate(parts), "kfree", k)


def is_kfree(n: int, k: int) -> bool:
    """Direct k-free test of a single integer (trial division)."""
    if n < 1:
        raise ValueError("k-freeness is defined for n >= 1")
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    for p in range(2, iroot(n, k) + 1):
        if n % p ** k == 0:
            return False
    return True


def zeta_k(k: int, terms: int = 10 ** 6) -> CertifiedValue:
    """Partial sum of zeta(k) with a certified tail bound.

    value = sum_{n <= terms} n^-k (exactly rounded via fsum);
    tail_bound = terms^(1-k) / (k-1), the integral majorant of the
    omitted tail.  True zeta(k) lies in [value, value + tail_bound],
    so intervals are nested as ``terms`` grows.
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    value = math.fsum(n ** -float(k) for n in range(1, terms + 1))
    tail = terms ** (1.0 - k) / (k - 1)
    return CertifiedValue(value, tail)


class KfreeCache:
    """Lazily extended segmented k-free table, shared across trials.

    Segments are built on demand (construction serialized by a lock) and
    are read-only afterwards, so any number of threads may consult the
    cache concurrently.  ``flags`` assembles a contiguous view for one
    query range.
    """

    def __init__(self, k: int, segment_size: int = DEFAULT_SEGMENT):
        if k < 2:
            raise ValueError(f"k must be at least 2, got {k}")
        self.k = k
        self.segment_size = segment_size
        self._segments: dict[int, np.ndarray] = {}
        self._primes = np.empty(0, dtype=np.int64)
        self._primes_hi = 1
        self._lock = threading.Lock()

    def _primes_for(self, hi: int) -> np.ndarray:
        bound = iroot(hi, self.k)
        if bound > self._primes_hi:
            self._primes = primes_up_to(max(bound, 2 * self._primes_hi))
            self._primes_hi = max(bound, 2 * self._primes_hi)
        return self._primes

    def ensure(self, lo: int, hi: int) -> None:
        _check_range(lo, hi)
        size = self.segment_size
        with self._lock:
            for idx in range(lo // size, hi // size + 1):
                if idx not in self._segments:
                    seg_lo = max(1, idx * size)
                    seg_hi = (idx + 1) * size - 1
                    seg = kernels.kfree_segment(seg_lo, seg_hi, self.k,
                                                self._primes_for(seg_hi))
                    if seg_lo != idx * size:  # segment 0 starts at n=1; pad index 0
                        seg = np.concatenate([np.zeros(1, dtype=np.uint8), seg])
                    seg.setflags(write=False)
                    self._segments[idx] = seg

    def flags(self, lo: int, hi: int) -> tuple[np.ndarray, int]:
        """Contiguous k-free flags covering [lo, hi]; returns (array, base).

        array[n - base] is the indicator of n, for every n in [lo, hi].
        """
        self.ensure(lo, hi)
        size = self.segment_size
        idx0 = lo // size
        parts = [self._segments[idx] for idx in range(idx0, hi // size + 1)]
        out = parts[0] if len(parts) == 1 else np.concatenate(parts)
        out.setflags(write=False)
        return out, idx0 * size
