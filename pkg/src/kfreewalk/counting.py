"""Classical sieve baselines: k-free counts, plain and in progressions.

Counts stream over fixed-size segments (default 2^20 flags) so memory
stays O(segment) however large N gets; predictions come from the
certified density constants, for cross-validation of the walk results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .arith import iroot, is_kfree, primes_up_to, _check_range
from .constants import beta_k, one_over_zeta

DEFAULT_SEGMENT = 1 << 20


@dataclass(frozen=True)
class CountReport:
    """A k-free count with its density and predicted limit density."""
    N: int
    k: int
    q: int
    r: int
    count: int
    density: float
    predicted: Optional[float]
    residual: Optional[float]


def count_kfree_ap(N: int, k: int, q: int = 1, r: int = 0,
                   segment_size: int = DEFAULT_SEGMENT,
                   zeta_terms: int = 10 ** 6) -> CountReport:
    """Count k-free n <= N with n = r (mod q), by segmented sieve.

    ``predicted`` is the limit density (1/zeta(k) for q=1, else the
    progression density) and is omitted when gcd(r,q) is not k-free,
    where the closed formula does not apply; the count stays exact.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if q < 1:
        raise ValueError("q must be at least 1")
    if not 0 <= r < q:
        raise ValueError(f"residue r must lie in [0, q-1], got r={r}, q={q}")
    _check_range(1, N)
    primes = primes_up_to(iroot(N, k))
    count = 0
    for lo in range(1, N + 1, segment_size):
        hi = min(lo + segment_size - 1, N)
        flags = kernels.kfree_segment(lo, hi, k, primes)
        first = lo + (r - lo) % q
        if first <= hi:
            count += int(flags[first - lo:: q].sum(dtype=int))
    density = count / N
    g = math.gcd(r, q) if r > 0 else q
    if q == 1:
        predicted = one_over_zeta(k, zeta_terms).value
    elif is_kfree(g, k):
        predicted = beta_k(k, q, r).value
    else:
        predicted = None
    residual = None if predicted is None else density - predicted
    return CountReport(N, k, q, r, count, density, predicted, residual)


def count_kfree(N: int, k: int, segment_size: int = DEFAULT_SEGMENT,
                zeta_terms: int = 10 ** 6) -> CountReport:
    """Count of k-free numbers up to N (the q=1 progression)."""
    return count_kfree_ap(N, k, 1, 0, segment_size, zeta_terms)
