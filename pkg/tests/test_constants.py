import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfreewalk.arith import iroot, mobius_sieve, primes_up_to, zeta_k
from kfreewalk.constants import (MeanDensity, WalkParams, beta_k,
                                 kfree_main_term, local_density,
                                 mean_local_density, one_over_zeta, theta_k)

ZETA3 = 1.2020569031595943  # reference for cross-checks


def f_ref(k: int, a: int, b: int, r: int, i: int) -> float:
    """Direct evaluation of the local density term (independent loop)."""
    if a < b:
        a, b = b, a
    mu = mobius_sieve(1, max(1, iroot(a * i + r, k))).values
    total = Fraction(0)
    for d in range(1, iroot(a * i + r, k) + 1):
        g = math.gcd(a - b, d ** k)
        if (b * i + r) % g == 0:
            total += Fraction(int(mu[d - 1]) * g, d ** k)
    return float(total)


class TestWalkParams:
    def test_rejects_equal_steps(self):
        with pytest.raises(ValueError, match="a must differ from b"):
            WalkParams(3, 2, 2, 0, 0.5)

    def test_rejects_alpha_boundary(self):
        with pytest.raises(ValueError, match="alpha"):
            WalkParams(3, 2, 3, 0, 1.0)

    def test_rejects_small_k(self):
        with pytest.raises(ValueError, match="k"):
            WalkParams(1, 2, 3, 0, 0.5)

    def test_normalized_swaps_step_probability(self):
        p = WalkParams(3, 2, 5, 1, 0.25)
        q = p.normalized()
        assert (q.a, q.b, q.alpha) == (5, 2, 0.75)
        assert WalkParams(3, 5, 2, 1, 0.25).normalized().alpha == 0.25


class TestTheta:
    def test_coprime_steps_give_one_over_zeta(self):
        # gcd(a,b)=1 collapses the product to 1/zeta(k)
        t = theta_k(WalkParams(3, 2, 3, 0, 0.5))
        ref = one_over_zeta(3)
        assert abs(t.value - ref.value) <= t.tail_bound + ref.tail_bound
        assert abs(t.value - 0.8319073725807076) <= 1e-9

    def test_shared_factor_hand_product(self):
        # a=3,b=6: p=3 contributes 1-3/27, the rest is (1/zeta(3))/(1-1/27)
        t = theta_k(WalkParams(3, 3, 6, 0, 0.5))
        want = (Fraction(12, 13)) / Fraction(ZETA3)
        assert abs(t.value - float(want)) <= 1e-9
        assert abs(t.value - 0.767914) <= 5e-7

    def test_excluded_prime_hand_product(self):
        # a=4,b=2,r=1: gcd(4,2,8)=2 does not divide 1, so p=2 contributes 1
        t = theta_k(WalkParams(3, 4, 2, 1, 0.5))
        want = float(Fraction(8, 7) / Fraction(ZETA3))
        assert abs(t.value - want) <= 1e-9
        assert abs(t.value - 0.950751) <= 5e-7

    def test_truncated_product_oracle(self):
        # brute Euler product over the same primes must lie inside the interval
        p = WalkParams(3, 6, 9, 3, 0.5)
        t = theta_k(p, prime_limit=1000)
        prod = 1.0
        for q in primes_up_to(1000):
            q = int(q)
            gq = math.gcd(math.gcd(6, 9), q ** 3)
            if 3 % gq == 0:
                prod *= 1 - gq / q ** 3
        assert t.value - t.tail_bound <= prod <= t.value + t.tail_bound

    def test_swap_invariance_bitwise(self):
        a = theta_k(WalkParams(3, 4, 10, 2, 0.3))
        b = theta_k(WalkParams(3, 10, 4, 2, 0.9))  # alpha must not matter
        assert a.value == b.value and a.tail_bound == b.tail_bound

    def test_tail_monotone_in_prime_limit(self):
        p = WalkParams(3, 6, 9, 3, 0.5)
        tails = [theta_k(p, prime_limit=L).tail_bound for L in (10, 100, 1000, 10000)]
        assert all(t2 <= t1 for t1, t2 in zip(tails, tails[1:]))

    def test_interval_within_unit(self):
        for p in (WalkParams(3, 2, 3, 0, 0.5), WalkParams(2, 8, 16, 8, 0.5),
                  WalkParams(4, 100, 200, 3, 0.5)):
            t = theta_k(p)
            assert t.value - t.tail_bound >= 0
            assert t.value + t.tail_bound <= 1

    def test_all_positions_divisible(self):
        # a=8,b=16,r=8,k=3: every position is 0 mod 8 = 2^3, never cube-free
        t = theta_k(WalkParams(3, 8, 16, 8, 0.5))
        assert t.value <= t.tail_bound  # theta = 0 up to truncation

    def test_prime_limit_validated(self):
        with pytest.raises(ValueError):
            theta_k(WalkParams(3, 2, 3, 0, 0.5), prime_limit=1)


class TestBeta:
    def test_trivial_modulus(self):
        b = beta_k(3, 1, 0)
        ref = one_over_zeta(3)
        assert abs(b.value - ref.value) <= b.tail_bound + ref.tail_bound

    def test_hand_value(self):
        # k=2, q=4, r=2 -> 1/(3 zeta(2))
        b = beta_k(2, 4, 2, prime_limit=10 ** 6)
        want = 1 / (3 * math.pi ** 2 / 6)
        assert abs(b.value - want) <= b.tail_bound + 1e-12
        assert abs(b.value - 0.202642) <= 5e-7

    def test_hypothesis_violation_rejected(self):
        # gcd(0,4) = 4 = 2^2 is not squarefree
        with pytest.raises(ValueError, match="not 2-free"):
            beta_k(2, 4, 0)

    def test_residue_range_validated(self):
        with pytest.raises(ValueError):
            beta_k(2, 4, 5)

    def test_sieve_crosscheck(self):
        # independent density estimate by direct counting
        from kfreewalk.counting import count_kfree_ap
        rep = count_kfree_ap(10 ** 6, 2, 4, 2)
        b = beta_k(2, 4, 2)
        assert abs(rep.density - b.value) <= 0.002


class TestLocalDensity:
    def test_only_d_one_in_range(self):
        # (a*i+r) < 2^k leaves only d=1
        assert local_density(WalkParams(3, 3, 1, 0, 0.5), 1) == 1.0

    def test_excluded_divisor(self):
        # a=9,b=1,r=0,i=1: d=2 has gcd(8,8)=8 which does not divide 1
        assert local_density(WalkParams(3, 9, 1, 0, 0.5), 1) == 1.0

    def test_matches_direct_loop(self):
        for (k, a, b, r) in ((3, 2, 3, 0), (3, 3, 6, 0), (3, 4, 2, 1), (4, 5, 3, 7)):
            p = WalkParams(k, a, b, r, 0.5)
            for i in (1, 2, 3, 10, 57, 200, 1234):
                assert abs(local_density(p, i) - f_ref(k, a, b, r, i)) < 1e-12

    def test_swap_normalization(self):
        p = WalkParams(3, 2, 5, 1, 0.3)
        q = WalkParams(3, 5, 2, 1, 0.8)
        for i in (1, 7, 100):
            assert local_density(p, i) == local_density(q, i)

    def test_bounded(self):
        p = WalkParams(3, 12, 4, 2, 0.5)
        vals = [local_density(p, i) for i in range(1, 500)]
        assert max(abs(v) for v in vals) < 3.0


class TestMainTerm:
    def test_two_divisors(self):
        assert kfree_main_term(7, 1, 1, 3) == pytest.approx(7 / 8, abs=1e-15)

    def test_single_term(self):
        # un+v < 2^k
        assert kfree_main_term(3, 1, 1, 3) == 1.0

    def test_hand_sum(self):
        # d <= 203^(1/3) = 5; d=2 excluded (2 does not divide 3); mu(4)=0
        want = float(Fraction(1) - Fraction(1, 27) - Fraction(1, 125))
        assert kfree_main_term(100, 2, 3, 3) == pytest.approx(want, abs=1e-15)

    @given(st.integers(min_value=1, max_value=500), st.integers(min_value=1, max_value=6),
           st.integers(min_value=1, max_value=30), st.integers(min_value=2, max_value=4))
    @settings(max_examples=60, deadline=None)
    def test_independent_loop(self, n, u, v, k):
        mu = mobius_sieve(1, max(1, iroot(u * n + v, k))).values
        total = Fraction(0)
        for d in range(1, iroot(u * n + v, k) + 1):
            g = math.gcd(u, d ** k)
            if v % g == 0:
                total += Fraction(int(mu[d - 1]) * g, d ** k)
        assert abs(kfree_main_term(n, u, v, k) - float(total)) < 1e-12


class TestMeanDensity:
    def test_single_term(self):
        p = WalkParams(3, 2, 3, 0, 0.5)
        res = mean_local_density(p, 1)
        assert abs(res.total - local_density(p, 1)) < 1e-12

    def test_coprime_mean_near_one_over_zeta(self):
        res = mean_local_density(WalkParams(3, 2, 3, 0, 0.5), 10 ** 4)
        assert abs(res.total / 10 ** 4 - 1 / ZETA3) <= 0.01

    def test_shared_factor_mean(self):
        res = mean_local_density(WalkParams(3, 3, 6, 0, 0.5), 10 ** 4)
        assert abs(res.total / 10 ** 4 - 0.767914) <= 0.01

    def test_residual_definition(self):
        res = mean_local_density(WalkParams(3, 4, 2, 1, 0.5), 100)
        assert res.residual == res.total - res.predicted

    def test_residual_exponent_fit(self):
        # fitted growth exponent of |residual| should not beat N^(1/k) by much
        p = WalkParams(3, 3, 6, 0, 0.5)
        Ns = [2 ** e for e in range(10, 18)]
        resid = [abs(mean_local_density(p, N).residual) for N in Ns]
        x = np.log(Ns)
        y = np.log(np.maximum(resid, 1e-12))
        slope = np.polyfit(x, y, 1)[0]
        assert slope <= 1 / 3 + 0.15
