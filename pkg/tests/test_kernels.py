"""Backend parity: the compiled extension must equal the numpy fallback
bit for bit (all three kernels are pure integer computations)."""

import numpy as np
import pytest

import kfreewalk.kernels as K
from kfreewalk.arith import primes_up_to
from kfreewalk.kernels import available_backends
from kfreewalk.rng import mix64

BACKENDS = available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2,
                                reason="compiled backend not built")


def test_backend_selected():
    assert K.BACKEND in ("pure", "compiled")
    assert "pure" in BACKENDS


@needs_both
@pytest.mark.parametrize("lo,hi", [(1, 1), (1, 100), (999, 1001),
                                   (10 ** 6, 10 ** 6 + 4096), (2, 70000)])
def test_mobius_parity(lo, hi):
    primes = primes_up_to(int(np.sqrt(hi)) + 1)
    a = BACKENDS["pure"].mobius_segment(lo, hi, primes)
    b = BACKENDS["compiled"].mobius_segment(lo, hi, primes)
    assert a.dtype == b.dtype == np.int8
    assert np.array_equal(a, b)


@needs_both
@pytest.mark.parametrize("k", [2, 3, 5])
@pytest.mark.parametrize("lo,hi", [(1, 100), (500, 5000), (10 ** 6, 10 ** 6 + 4096)])
def test_kfree_parity(k, lo, hi):
    primes = primes_up_to(int(hi ** (1 / k)) + 2)
    a = BACKENDS["pure"].kfree_segment(lo, hi, k, primes)
    b = BACKENDS["compiled"].kfree_segment(lo, hi, k, primes)
    assert a.dtype == b.dtype == np.uint8
    assert np.array_equal(a, b)


@needs_both
@pytest.mark.parametrize("seed", [0, 1, 42, 2 ** 64 - 1])
@pytest.mark.parametrize("alpha_u64", [1, 2 ** 62, 2 ** 63, 2 ** 64 - 1])
def test_walk_parity(seed, alpha_u64):
    flags = BACKENDS["pure"].kfree_segment(1, 10 ** 5, 3, primes_up_to(50))
    a = BACKENDS["pure"].walk_hits(seed, alpha_u64, 10 ** 4, 2, 7, 3, flags, 1)
    b = BACKENDS["compiled"].walk_hits(seed, alpha_u64, 10 ** 4, 2, 7, 3, flags, 1)
    assert a == b


@needs_both
def test_walk_parity_long_stream():
    flags = BACKENDS["pure"].kfree_segment(1, 7 * 10 ** 6, 3, primes_up_to(200))
    for t in range(4):
        s = mix64(123456789, t)
        a = BACKENDS["pure"].walk_hits(s, 2 ** 63 + 17, 10 ** 6, 3, 6, 0, flags, 1)
        b = BACKENDS["compiled"].walk_hits(s, 2 ** 63 + 17, 10 ** 6, 3, 6, 0, flags, 1)
        assert a == b
