"""Exact (non Monte Carlo) distribution of k-free hit counts.

Everything here evaluates finite sums: binomial weights restricted to
congruence classes or to k-free values, per-step hit probabilities
E(X_i), pairwise E(X_i X_j), and the exact mean/variance of the hit
proportion.  ``oracle_full_paths`` recomputes all of it by brute-force
enumeration of every step sequence and is the ground truth the rest is
tested against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .arith import KfreeCache, kfree_sieve
from .constants import WalkParams, kfree_main_term

logger = logging.getLogger("kfreewalk")

PAIR_CAP = 3000          # refuse exact variance above this N (quadratic pairs)
EXACT_PAIR_CAP = 300     # full pair enumeration below; subsample above
ORACLE_CAP = 20          # 2^N paths
_PAIR_SAMPLE_BUDGET = 1500


@dataclass(frozen=True, eq=False)
class BinomialPMF:
    """Binomial(n, alpha) weights, built without factorials."""
    n: int
    alpha: float
    weights: np.ndarray

    def __post_init__(self):
        self.weights.setflags(write=False)


@dataclass(frozen=True, eq=False)
class ExactMoments:
    """Exact E(X_i), E(Sbar) and optionally V(Sbar) for one walk."""
    params: WalkParams
    N: int
    e_xi: np.ndarray
    e_sbar: float
    v_sbar: Optional[float]
    method: str
    v_sbar_raw: Optional[float] = None
    variance_estimated: bool = False

    def __post_init__(self):
        self.e_xi.setflags(write=False)


class RestrictedSum(NamedTuple):
    """A restricted binomial sum, its predicted main term, and the gap."""
    exact: float
    main: float
    error: float


def binom_pmf(n: int, alpha: float) -> BinomialPMF:
    """Weights C(n,l) alpha^l (1-alpha)^(n-l), l = 0..n.

    Multiplicative recurrence seeded at the mode (ratios away from the
    mode are <= 1, so nothing overflows; far tails underflow to 0),
    then renormalized to unit mass.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0,1)")
    w = np.empty(n + 1, dtype=np.float64)
    m = min(n, int((n + 1) * alpha))
    w[m] = 1.0
    if m > 0:
        l = np.arange(m, 0, -1, dtype=np.float64)
        w[m - 1:: -1] = np.cumprod(l * (1.0 - alpha) / ((n - l + 1.0) * alpha))
    if m < n:
        l = np.arange(m, n, dtype=np.float64)
        w[m + 1:] = np.cumprod((n - l) * alpha / ((l + 1.0) * (1.0 - alpha)))
    w /= w.sum()
    return BinomialPMF(n, alpha, w)


def binom_congruence_sum(n: int, d: int, c: int, alpha: float) -> RestrictedSum:
    """Binomial mass on {l : l = c mod d} against the equidistribution
    main term 1/d.  The gap decays like 1/sqrt(alpha(1-alpha)n)."""
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    w = binom_pmf(n, alpha).weights
    # pairwise reduction: error ~ log2(n)*eps on a mass <= 1, far below 1e-12
    exact = min(1.0, float(w[c % d:: d].sum()))
    main = 1.0 / d
    return RestrictedSum(exact, main, exact - main)


def kfree_binom_sum(n: int, u: int, v: int, k: int, alpha: float,
                    cache: Optional[KfreeCache] = None) -> RestrictedSum:
    """Binomial mass on {m : um+v is k-free} against its Mobius main term.

    k-freeness is read from one sieved table over [v, un+v] (supplied by
    ``cache`` when the caller batches many such sums).
    """
    if n < 1 or u < 1 or v < 1:
        raise ValueError("need n, u, v >= 1")
    w = binom_pmf(n, alpha).weights
    values = u * np.arange(n + 1, dtype=np.int64) + v
    if cache is not None:
        if cache.k != k:
            raise ValueError(f"cache is for k={cache.k}, not k={k}")
        table, base = cache.flags(v, u * n + v)
    else:
        st = kfree_sieve(v, u * n + v, k)
        table, base = st.values, st.lo
    mask = table[values - base].astype(bool)
    exact = min(1.0, float(w[mask].sum()))
    main = kfree_main_term(n, u, v, k)
    return RestrictedSum(exact, main, exact - main)


def expect_hit(p: WalkParams, i: int, cache: Optional[KfreeCache] = None) -> float:
    """E(X_i): probability that the walk position after step i is k-free.

    The position is r + la + (i-l)b with l ~ Binomial(i, alpha); after
    ordering the steps so a > b this is the k-free restricted binomial
    sum with modulus a-b and offset ib+r.
    """
    if i < 1:
        raise ValueError("i must be >= 1")
    q = p.normalized()
    return kfree_binom_sum(i, q.a - q.b, i * q.b + q.r, q.k, q.alpha, cache).exact


def expect_hit_pair(p: WalkParams, i: int, j: int,
                    cache: Optional[KfreeCache] = None) -> float:
    """E(X_i X_j) for i < j: both positions k-free.

    Double binomial sum over l (steps of size a among the first i) and
    h (among the next j-i); cost O(i * (j-i)).
    """
    if not 1 <= i < j:
        raise ValueError("need 1 <= i < j")
    q = p.normalized()
    A, B, r, k, al = q.a, q.b, q.r, q.k, q.alpha
    u = A - B
    wi = binom_pmf(i, al).weights
    wh = binom_pmf(j - i, al).weights
    lo, hi = r + j * B, r + j * A
    if cache is not None:
        if cache.k != k:
            raise ValueError(f"cache is for k={cache.k}, not k={k}")
        table, base = cache.flags(min(lo, r + i * B), hi)
    else:
        st = kfree_sieve(min(lo, r + i * B), hi, k)
        table, base = st.values, st.lo
    pos_i = r + i * B + u * np.arange(i + 1, dtype=np.int64)
    hit_i = table[pos_i - base].astype(bool)
    offs = (j - i) * B + u * np.arange(j - i + 1, dtype=np.int64)
    terms = []
    for l in range(i + 1):
        if hit_i[l]:
            hit_j = table[pos_i[l] + offs - base].astype(np.float64)
            terms.append(wi[l] * float(np.dot(wh, hit_j)))
    return math.fsum(terms)


def _pair_indices(N: int) -> list[tuple[int, int]]:
    """Deterministic subsample of pairs 1 <= i < j <= N within budget."""
    total = N * (N - 1) // 2
    stride = max(1, total // _PAIR_SAMPLE_BUDGET)
    out = []
    t = 0
    for j in range(2, N + 1):
        for i in range(1, j):
            if t % stride == 0:
                out.append((i, j))
            t += 1
    return out


def exact_moments(p: WalkParams, N: int, with_variance: bool = False,
                  pair_cap: int = PAIR_CAP) -> ExactMoments:
    """Exact E(Sbar) (and V(Sbar) if requested) via per-step binomial sums.

    Variance uses E(X_i^2) = E(X_i) and the pairwise terms; the full
    O(N^2) pair enumeration runs for N <= 300, a deterministic pair
    subsample estimates the covariance sum for larger N, and N above
    ``pair_cap`` is refused outright.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    cache = KfreeCache(p.k)
    e_xi = np.array([expect_hit(p, i, cache) for i in range(1, N + 1)])
    e_sbar = math.fsum(e_xi) / N
    v_sbar = v_raw = None
    estimated = False
    if with_variance:
        if N > pair_cap:
            raise ValueError(
                f"exact variance needs N <= pair_cap = {pair_cap}, got N = {N}")
        if N <= EXACT_PAIR_CAP:
            pair_sum = math.fsum(expect_hit_pair(p, i, j, cache)
                                 for j in range(2, N + 1) for i in range(1, j))
        else:
            pairs = _pair_indices(N)
            sampled = math.fsum(expect_hit_pair(p, i, j, cache) for i, j in pairs)
            pair_sum = sampled * (N * (N - 1) / 2) / len(pairs)
            estimated = True
        e_sbar_sq = (2.0 * pair_sum + math.fsum(e_xi)) / (N * N)
        v_raw = e_sbar_sq - e_sbar * e_sbar
        v_sbar = v_raw
        if -1e-10 <= v_raw < 0.0:
            logger.warning("clamping tiny negative variance %.3e to 0", v_raw)
            v_sbar = 0.0
    return ExactMoments(p, N, e_xi, e_sbar, v_sbar, "binomial_sum",
                        v_sbar_raw=v_raw, variance_estimated=estimated)


def oracle_full_paths(p: WalkParams, N: int) -> ExactMoments:
    """Ground truth by enumerating all 2^N step sequences (N <= 20).

    Weights each path by alpha^(#a-steps) (1-alpha)^(#b-steps) and
    accumulates E(X_i), E(Sbar), V(Sbar) directly, independent of the
    binomial-sum machinery.
    """
    if not 1 <= N <= ORACLE_CAP:
        raise ValueError(f"full path enumeration needs 1 <= N <= {ORACLE_CAP}")
    k, a, b, r, alpha = p.k, p.a, p.b, p.r, p.alpha
    hi = r + N * max(a, b)
    st = kfree_sieve(1, hi, k)
    table = st.values
    npaths = 1 << N
    bit = np.arange(N, dtype=np.uint32)
    e_xi = np.zeros(N, dtype=np.float64)
    e_s = 0.0
    e_s2 = 0.0
    chunk = 1 << 16
    for start in range(0, npaths, chunk):
        idx = np.arange(start, min(start + chunk, npaths), dtype=np.uint32)
        bits = (idx[:, None] >> bit[None, :]) & 1
        steps = np.where(bits == 1, a, b).astype(np.int64)
        pos = r + np.cumsum(steps, axis=1)
        hits = table[pos - st.lo].astype(np.float64)
        n_a = bits.sum(axis=1)
        w = alpha ** n_a.astype(np.float64) * (1.0 - alpha) ** (N - n_a).astype(np.float64)
        e_xi += w @ hits
        sbar = hits.sum(axis=1) / N
        e_s += float(np.dot(w, sbar))
        e_s2 += float(np.dot(w, sbar * sbar))
    v = e_s2 - e_s * e_s
    v_raw = v
    if -1e-10 <= v < 0.0:
        v = 0.0
    return ExactMoments(p, N, e_xi, e_s, v, "full_path_enumeration", v_sbar_raw=v_raw)
