# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of kernels/pure.py (see that module for contracts).

Same integer algorithms, tight C loops.  Output must be bit-identical
to the pure backend.
"""

import numpy as np

cimport cython
from libc.stdint cimport int8_t, int64_t, uint8_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9u
cdef uint64_t MIX2 = 0x94D049BB133111EBu


cdef inline uint64_t fin64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


def mobius_segment(long long lo, long long hi, primes):
    cdef int64_t n = hi - lo + 1
    mu_arr = np.ones(n, dtype=np.int8)
    rem_arr = np.arange(lo, hi + 1, dtype=np.int64)
    cdef int8_t[::1] mu = mu_arr
    cdef int64_t[::1] rem = rem_arr
    cdef int64_t[::1] ps = np.ascontiguousarray(primes, dtype=np.int64)
    cdef int64_t p, p2, i
    cdef Py_ssize_t ip
    with nogil:
        for ip in range(ps.shape[0]):
            p = ps[ip]
            if p * p > hi:
                break
            i = ((lo + p - 1) // p) * p - lo
            while i < n:
                mu[i] = -mu[i]
                rem[i] //= p
                i += p
            p2 = p * p
            i = ((lo + p2 - 1) // p2) * p2 - lo
            while i < n:
                mu[i] = 0
                i += p2
        for i in range(n):
            if rem[i] > 1:
                mu[i] = -mu[i]
    return mu_arr


def kfree_segment(long long lo, long long hi, long k, primes):
    cdef int64_t n = hi - lo + 1
    flags_arr = np.ones(n, dtype=np.uint8)
    cdef uint8_t[::1] flags = flags_arr
    cdef int64_t[::1] ps = np.ascontiguousarray(primes, dtype=np.int64)
    cdef int64_t p, pk, i
    cdef long e
    cdef Py_ssize_t ip
    cdef bint overflow
    with nogil:
        for ip in range(ps.shape[0]):
            p = ps[ip]
            pk = 1
            overflow = False
            for e in range(k):
                if pk > hi // p:
                    overflow = True
                    break
                pk *= p
            if overflow or pk > hi:
                break
            i = ((lo + pk - 1) // pk) * pk - lo
            while i < n:
                flags[i] = 0
                i += pk
    return flags_arr


def walk_hits(uint64_t trial_seed, uint64_t threshold, int64_t n,
              int64_t a, int64_t b, int64_t start,
              const uint8_t[::1] flags, int64_t flags_lo):
    cdef int64_t pos = start
    cdef int64_t hits = 0
    cdef int64_t j
    cdef uint64_t u
    with nogil:
        for j in range(1, n + 1):
            u = fin64(trial_seed + (<uint64_t> j) * GOLDEN)
            if u < threshold:
                pos += a
            else:
                pos += b
            hits += flags[pos - flags_lo]
    return hits
