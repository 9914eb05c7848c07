"""Analytic densities for k-free hits of two-step random walks.

A walk starts at r and adds step a (probability alpha) or step b
(probability 1 - alpha) at each move.  The asymptotic proportion of
visited positions that are k-free is an Euler product over primes,
computed here with certified truncation bounds, together with the
per-step local density f(i), its mean, and the main term of k-free
restricted binomial sums.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import iroot, is_kfree, mobius_sieve, primes_up_to, zeta_k

DEFAULT_PRIME_LIMIT = 100_000


@dataclass(frozen=True)
class WalkParams:
    """Parameters (k, a, b, r, alpha) of a k-free test along a walk."""
    k: int
    a: int
    b: int
    r: int
    alpha: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.a < 1 or self.b < 1:
            raise ValueError("a and b must be positive")
        if self.a == self.b:
            raise ValueError("a must differ from b")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0,1)")

    def normalized(self) -> "WalkParams":
        """Equivalent parameters with a > b.

        Swapping the step labels must swap the step probability too:
        (k,a,b,r,alpha) and (k,b,a,r,1-alpha) describe the same walk.
        """
        if self.a > self.b:
            return self
        return WalkParams(self.k, self.b, self.a, self.r, 1.0 - self.alpha)


@dataclass(frozen=True)
class DensityConstant:
    """An asymptotic density in [0,1] with a certified truncation bound."""
    value: float
    tail_bound: float
    kind: str

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be nonnegative")
        if self.value - self.tail_bound < -1e-12 or self.value + self.tail_bound > 1 + 1e-12:
            raise ValueError("density interval must lie within [0, 1]")

    def contains(self, x: float) -> bool:
        return self.value - self.tail_bound <= x <= self.value + self.tail_bound


def _padic_valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def theta_k(p: WalkParams, prime_limit: int = DEFAULT_PRIME_LIMIT) -> DensityConstant:
    """Asymptotic k-free hit density of the walk (independent of alpha).

    Product over primes q with gcd(a,b,q^k) | r of (1 - gcd(a,b,q^k)/q^k);
    primes failing the divisibility test contribute factor 1.  Only the
    primes dividing gcd(a,b) can have gcd(a,b,q^k) > 1, so the truncated
    product over q <= prime_limit brackets the true value:

        value * (1 - g*T) <= theta <= value,   T = L^(1-k)/(k-1)

    with g = gcd(a,b).  Returned as midpoint +/- half-width.
    """
    if prime_limit < 2:
        raise ValueError("prime_limit must be at least 2")
    k, a, b, r = p.k, p.a, p.b, p.r
    g = math.gcd(a, b)
    prod = 1.0
    for q in primes_up_to(prime_limit):
        q = int(q)
        qk = q ** k
        if g % q == 0:
            gq = q ** min(k, _padic_valuation(g, q))
            if r % gq == 0:
                prod *= 1.0 - gq / qk
        else:
            prod *= 1.0 - 1.0 / qk
    tail = g * prime_limit ** (1.0 - k) / (k - 1)
    lower = prod * max(0.0, 1.0 - tail)
    value = 0.5 * (lower + prod)
    kind = f"theta(k={k},a={a},b={b},r={r})"
    return DensityConstant(value, 0.5 * (prod - lower), kind)


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _euler_phi(n: int) -> int:
    out = n
    for q in _factorize(n):
        out = out // q * (q - 1)
    return out


def beta_k(k: int, q: int, r: int, prime_limit: int = DEFAULT_PRIME_LIMIT) -> DensityConstant:
    """Density of k-free numbers in the progression r mod q.

    Closed form: phi(q) / (gcd(r,q) * phi(q/gcd(r,q))) * 1/(q*zeta(k))
    * prod_{p | q} (1 - p^-k)^-1, valid when gcd(r,q) is k-free.  The
    rational coefficient is exact; only 1/zeta(k) is truncated (using
    ``prime_limit`` terms of the zeta sum).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if q < 1:
        raise ValueError("q must be at least 1")
    if not 0 <= r < q:
        raise ValueError("r must lie in [0, q-1]")
    if prime_limit < 2:
        raise ValueError("prime_limit must be at least 2")
    g = math.gcd(r, q) if r > 0 else q
    if not is_kfree(g, k):
        raise ValueError(f"gcd(r,q) = {g} is not {k}-free; the density formula does not apply")
    coeff = Fraction(_euler_phi(q), g * _euler_phi(q // g) * q)
    for p in _factorize(q):
        pk = p ** k
        coeff *= Fraction(pk, pk - 1)
    z = zeta_k(k, terms=prime_limit)
    # true zeta lies in [z.value, z.value + z.tail_bound]
    upper = min(1.0, float(coeff / Fraction(z.value)) * (1 + 1e-14))
    lower = max(0.0, float(coeff / Fraction(z.value + z.tail_bound)) * (1 - 1e-14))
    kind = f"beta(k={k},q={q},r={r})"
    return DensityConstant(0.5 * (lower + upper), 0.5 * (upper - lower), kind)


def one_over_zeta(k: int, terms: int = 10 ** 6) -> DensityConstant:
    """1/zeta(k) as a certified density (the q=1 progression)."""
    z = zeta_k(k, terms)
    upper = min(1.0, (1.0 / z.value) * (1 + 1e-15))
    lower = (1.0 / (z.value + z.tail_bound)) * (1 - 1e-15)
    return DensityConstant(0.5 * (lower + upper), 0.5 * (upper - lower),
                           kind=f"one_over_zeta(k={k})")


class _MobiusTerms:
    """Mobius-weighted divisor data for one modulus u >= 1.

    For squarefree d (mu(d) != 0) keeps g_d = gcd(u, d^k) and the term
    mu(d) * g_d / d^k.  Entries with g_d = 1 pass every divisibility
    test, so they are presummed; only d sharing a factor with u need a
    per-call modulo check.
    """

    def __init__(self, u: int, k: int, dmax: int):
        if u < 1:
            raise ValueError("modulus u must be >= 1")
        self.u = u
        self.k = k
        self.dmax = max(1, dmax)
        mu = mobius_sieve(1, self.dmax).values
        dks, gs, terms = [], [], []
        base: list[float] = []
        base_dks: list[int] = []
        for d in range(1, self.dmax + 1):
            m = int(mu[d - 1])
            if m == 0:
                continue
            dk = d ** k
            gd = math.gcd(u, dk)
            if gd == 1:
                base_dks.append(dk)
                base.append(m / dk)
            else:
                dks.append(dk)
                gs.append(gd)
                terms.append(m * (gd / dk))
        self._base_dks = base_dks
        self._base_terms = base
        # exactly rounded prefix sums of the unconditional terms
        self._base_prefix = [math.fsum(base[:i]) for i in range(len(base) + 1)]
        self._cond_dks = dks
        self._cond_gs = gs
        self._cond_terms = terms

    def value(self, bound: int, v: int) -> float:
        """sum over squarefree d with d^k <= bound, gcd(u,d^k) | v."""
        nb = bisect_right(self._base_dks, bound)
        picked = [self._base_prefix[nb]]
        for dk, gd, t in zip(self._cond_dks, self._cond_gs, self._cond_terms):
            if dk > bound:
                break
            if v % gd == 0:
                picked.append(t)
        return math.fsum(picked)


@lru_cache(maxsize=128)
def _terms_cached(u: int, k: int, dmax: int) -> _MobiusTerms:
    return _MobiusTerms(u, k, dmax)


def _terms_for(u: int, k: int, dmax: int) -> _MobiusTerms:
    """Cached term table, sized up to the next power of two.

    Oversizing is harmless (``value`` restricts by d^k <= bound) and
    lets one table serve a whole range of bounds.
    """
    bucket = max(16, 1 << max(1, dmax - 1).bit_length())
    return _terms_cached(u, k, bucket)


def kfree_main_term(n: int, u: int, v: int, k: int) -> float:
    """Main term of the k-free restricted binomial sum over um+v, m <= n.

    sum_{1 <= d <= (un+v)^(1/k), gcd(u,d^k) | v} mu(d) * gcd(u,d^k) / d^k,
    accumulated by exactly rounded summation (|error| < 1e-12).
    """
    if n < 1 or u < 1 or v < 1:
        raise ValueError("need n, u, v >= 1")
    if k < 2:
        raise ValueError("k must be at least 2")
    bound = u * n + v
    return _terms_for(u, k, iroot(bound, k)).value(bound, v)


def local_density(p: WalkParams, i: int) -> float:
    """Expected-hit main term f(i) at step i.

    With (a, b) ordered so a > b and u = a - b:
    f(i) = sum_{1 <= d <= (ai+r)^(1/k), gcd(u,d^k) | bi+r} mu(d)*gcd(u,d^k)/d^k.
    Bounded uniformly in i for fixed steps.
    """
    if i < 1:
        raise ValueError("i must be >= 1")
    q = p.normalized()
    u = q.a - q.b
    bound = q.a * i + q.r
    return _terms_for(u, q.k, iroot(bound, q.k)).value(bound, q.b * i + q.r)


@dataclass(frozen=True)
class MeanDensity:
    """Partial sums of f against the Euler-product prediction."""
    total: float
    predicted: float
    residual: float


def mean_local_density(p: WalkParams, N: int,
                       prime_limit: int = DEFAULT_PRIME_LIMIT) -> MeanDensity:
    """sum_{i <= N} f(i), its prediction theta * N, and the residual.

    The residual is O(N^(1/k)) with a constant depending on the walk
    parameters; callers fit or cap that constant.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    q = p.normalized()
    u, k, a, b, r = q.a - q.b, q.k, q.a, q.b, q.r
    terms = _terms_for(u, k, iroot(a * N + r, k))
    vals = [terms.value(a * i + r, b * i + r) for i in range(1, N + 1)]
    total = math.fsum(vals)
    predicted = theta_k(p, prime_limit).value * N
    return MeanDensity(total, predicted, total - predicted)
