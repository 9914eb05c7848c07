"""Pinned desk-scale verification suite behind ``kfreewalk verify``.

Each check re-derives a quantitative contract of the library at fixed
parameters and returns pass/fail plus the measured statistic, so a
clean build passes everything and any sieve/summation regression trips
at least one check.  ``inject_fault`` flips one sieve bit on purpose to
demonstrate the suite can actually fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import KfreeCache, kfree_sieve, mobius_sieve, zeta_k
from .constants import WalkParams, mean_local_density
from .counting import count_kfree, count_kfree_ap
from .exactdist import binom_congruence_sum, exact_moments, kfree_binom_sum, oracle_full_paths

CONGRUENCE_STAT_CAP = 2.0
KFREE_SUM_STAT_CAP = 5.0
MEAN_DENSITY_CAP = 3.0

THETA_POINTS = (
    WalkParams(3, 2, 3, 0, 0.5),
    WalkParams(3, 3, 6, 0, 0.5),
    WalkParams(3, 4, 2, 1, 0.5),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_congruence_sums(quick: bool = False) -> CheckResult:
    """Restricted binomial sums stay within the 1/sqrt(alpha(1-alpha)n) band."""
    top = 10 if quick else 16
    worst = 0.0
    for e in range(6, top + 1):
        n = 1 << e
        for alpha in (0.1, 0.5, 0.9):
            for d in (2, 3, 5, 8):
                for c in range(d):
                    res = binom_congruence_sum(n, d, c, alpha)
                    stat = abs(res.error) * math.sqrt(alpha * (1 - alpha) * n)
                    worst = max(worst, stat)
    return CheckResult("congruence_sums", worst <= CONGRUENCE_STAT_CAP,
                       f"max |error|*sqrt(a(1-a)n) = {worst:.4f} (cap {CONGRUENCE_STAT_CAP})")


def check_kfree_sums(quick: bool = False) -> CheckResult:
    """k-free restricted sums match their Mobius main term at the stated rate."""
    top = 10 if quick else 16
    worst = 0.0
    caches = {k: KfreeCache(k) for k in (3, 4)}
    for e in range(6, top + 1):
        n = 1 << e
        for k in (3, 4):
            for u, v in ((1, 1), (2, 5), (5, 3)):
                for alpha in (0.1, 0.5, 0.9):
                    res = kfree_binom_sum(n, u, v, k, alpha, caches[k])
                    stat = (abs(res.error) * math.sqrt(alpha * (1 - alpha) * n)
                            / (u * n + v) ** (1.0 / k))
                    worst = max(worst, stat)
    return CheckResult("kfree_sums", worst <= KFREE_SUM_STAT_CAP,
                       f"max scaled error = {worst:.4f} (cap {KFREE_SUM_STAT_CAP})")


def check_mean_density(quick: bool = False) -> CheckResult:
    """Partial sums of f track theta*N within 3*N^(1/k)."""
    grid = (10 ** 3,) if quick else (10 ** 3, 10 ** 4, 10 ** 5)
    worst = 0.0
    ok = True
    for p in THETA_POINTS:
        for N in grid:
            res = mean_local_density(p, N)
            ratio = abs(res.residual) / N ** (1.0 / p.k)
            worst = max(worst, ratio)
            ok = ok and ratio <= MEAN_DENSITY_CAP
    return CheckResult("mean_density", ok,
                       f"max |residual|/N^(1/k) = {worst:.4f} (cap {MEAN_DENSITY_CAP})")


def check_sieve_identities(quick: bool = False, inject_fault: bool = False) -> CheckResult:
    """Mobius/k-free consistency and segmentation independence."""
    top = 10 ** 4
    mu = mobius_sieve(1, top).values
    problems = []
    for k in (2, 3):
        flags = kfree_sieve(1, top, k).values.copy()
        if inject_fault and k == 2:
            flags[1233] ^= 1
        # indicator of k-freeness as the divisor sum of mu over k-th powers
        ind = np.zeros(top + 1, dtype=np.int64)
        d = 1
        while d ** k <= top:
            ind[d ** k:: d ** k] += mu[d - 1]
            d += 1
        if not np.array_equal(ind[1:], flags.astype(np.int64)):
            problems.append(f"mu_k identity broken for k={k}")
    whole = kfree_sieve(1, 3 * 10 ** 4, 3).values
    split = kfree_sieve(1, 3 * 10 ** 4, 3, segment_size=997).values
    if not np.array_equal(whole, split):
        problems.append("kfree segmentation changed values")
    m_whole = mobius_sieve(1, 3 * 10 ** 4).values
    m_split = mobius_sieve(1, 3 * 10 ** 4, segment_size=1013).values
    if not np.array_equal(m_whole, m_split):
        problems.append("mobius segmentation changed values")
    z1, z2 = zeta_k(3, 100), zeta_k(3, 10 ** 4)
    if not (z1.value <= z2.value and z2.value + z2.tail_bound <= z1.value + z1.tail_bound + 1e-15):
        problems.append("zeta intervals not nested")
    return CheckResult("sieve_identities", not problems,
                       "; ".join(problems) if problems else "all identities hold")


def check_residue_partition(quick: bool = False) -> CheckResult:
    """Counts over residue classes sum to the unrestricted count."""
    N = 10 ** 4 if quick else 10 ** 5
    k = 3
    total = count_kfree(N, k).count
    bad = []
    for q in (3, 4, 5):
        parts = sum(count_kfree_ap(N, k, q, r).count for r in range(q))
        if parts != total:
            bad.append(f"q={q}: {parts} != {total}")
    return CheckResult("residue_partition", not bad,
                       "; ".join(bad) if bad else f"partition exact for q in (3,4,5), N={N}")


def check_counting_baselines(quick: bool = False) -> CheckResult:
    """Small exact counts with known values."""
    cases = ((count_kfree(10, 2).count, 7), (count_kfree(8, 3).count, 7),
             (count_kfree_ap(20, 2, 4, 2).count, 4))
    ok = all(got == want for got, want in cases)
    return CheckResult("counting_baselines", ok, f"counts {[g for g, _ in cases]}")


def check_oracle_equivalence(quick: bool = False) -> CheckResult:
    """Binomial-sum moments equal full-path enumeration."""
    pts = (WalkParams(3, 2, 3, 0, 0.5), WalkParams(3, 8, 1, 0, 0.3),
           WalkParams(4, 4, 2, 1, 0.7))
    N = 8 if quick else 10
    worst = 0.0
    for p in pts:
        ex = exact_moments(p, N, with_variance=True)
        orc = oracle_full_paths(p, N)
        worst = max(worst,
                    float(np.max(np.abs(ex.e_xi - orc.e_xi))),
                    abs(ex.e_sbar - orc.e_sbar),
                    abs((ex.v_sbar or 0.0) - (orc.v_sbar or 0.0)))
    return CheckResult("oracle_equivalence", worst <= 1e-10,
                       f"max |binomial_sum - enumeration| = {worst:.2e}")


ALL_CHECKS = (
    check_congruence_sums,
    check_kfree_sums,
    check_mean_density,
    check_sieve_identities,
    check_residue_partition,
    check_counting_baselines,
    check_oracle_equivalence,
)


def run_suite(quick: bool = False, inject_fault: bool = False) -> list[CheckResult]:
    out = []
    for fn in ALL_CHECKS:
        if fn is check_sieve_identities:
            out.append(fn(quick, inject_fault=inject_fault))
        else:
            out.append(fn(quick))
    return out
