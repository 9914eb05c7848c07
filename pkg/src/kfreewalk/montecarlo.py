"""Reproducible Monte Carlo simulation of k-free hits along walks.

Trials are independent replications driven by the counter-based RNG in
:mod:`kfreewalk.rng`: trial t of a batch uses the stream seeded at
``mix64(master_seed, t)``, and nested experiments (one batch per grid
point g) seed their batches at ``mix64(master_seed, g)``.  Because every
draw is a pure function of (seed, counter), results are identical for
any worker count or scheduling, and across the compiled and pure
backends.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .arith import KfreeCache
from .constants import DensityConstant, WalkParams, theta_k
from .rng import alpha_threshold, mix64

logger = logging.getLogger("kfreewalk")


@dataclass(frozen=True, eq=False)
class TrialBatch:
    """Per-trial hit proportions plus summary statistics."""
    params: WalkParams
    N: int
    master_seed: int
    trials: int
    sbar_values: np.ndarray
    mean: float
    sample_variance: float

    def __post_init__(self):
        self.sbar_values.setflags(write=False)


@dataclass(frozen=True, eq=False)
class DecayFit:
    """Least-squares fit of log(variance) against log(N)."""
    Ns: tuple
    variances: np.ndarray
    slope: float
    intercept: float
    r_squared: float

    def __post_init__(self):
        self.variances.setflags(write=False)


def max_workers() -> int:
    """Worker cap: KFREEWALK_THREADS if set, else min(cpu_count, 8)."""
    env = os.environ.get("KFREEWALK_THREADS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("KFREEWALK_THREADS must be >= 1")
        return n
    return min(os.cpu_count() or 1, 8)


def _hit_table(p: WalkParams, N: int, cache: Optional[KfreeCache]):
    lo, hi = max(1, p.r), p.r + N * max(p.a, p.b)
    if cache is None:
        cache = KfreeCache(p.k)
    if cache.k != p.k:
        raise ValueError(f"cache is for k={cache.k}, not k={p.k}")
    return cache.flags(lo, hi)


def simulate_walk(p: WalkParams, N: int, trial_seed: int,
                  cache: Optional[KfreeCache] = None) -> tuple[float, int]:
    """One walk of N steps: returns (hit proportion, hit count).

    Deterministic function of (params, N, trial_seed).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    table, base = _hit_table(p, N, cache)
    threshold = alpha_threshold(p.alpha)
    hits = int(kernels.walk_hits(trial_seed, threshold, N, p.a, p.b, p.r,
                                 table, base))
    return hits / N, hits


def run_trials(p: WalkParams, N: int, trials: int, master_seed: int,
               cache: Optional[KfreeCache] = None) -> TrialBatch:
    """Independent trials of the N-step experiment, scheduling-invariant.

    The k-free table is built once (read-only afterwards) and shared by
    all workers; results land in trial order regardless of execution
    order, and the summary reduction is a fixed-order exact sum.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if N < 1:
        raise ValueError("N must be >= 1")
    table, base = _hit_table(p, N, cache)
    threshold = alpha_threshold(p.alpha)
    seeds = [mix64(master_seed, t) for t in range(trials)]
    hits = np.zeros(trials, dtype=np.int64)

    def work(t: int) -> None:
        hits[t] = kernels.walk_hits(seeds[t], threshold, N, p.a, p.b, p.r,
                                    table, base)

    workers = min(max_workers(), trials)
    if workers == 1:
        for t in range(trials):
            work(t)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(trials)))
    sbar = hits / N
    mean = math.fsum(sbar) / trials
    if trials > 1:
        var = math.fsum((x - mean) ** 2 for x in sbar) / (trials - 1)
    else:
        var = 0.0
    return TrialBatch(p, N, master_seed, trials, sbar, mean, var)


def variance_decay(p: WalkParams, Ns: Sequence[int], trials_per_N: int,
                   master_seed: int) -> DecayFit:
    """Empirical V(Sbar_N) over a grid of N, with a log-log slope fit.

    Grid points with zero sample variance (possible at tiny N when every
    reachable position is k-free) are dropped from the regression with a
    warning.
    """
    Ns = tuple(int(N) for N in Ns)
    if len(Ns) < 4:
        raise ValueError("variance decay needs at least 4 grid points")
    if any(n2 <= n1 for n1, n2 in zip(Ns, Ns[1:])):
        raise ValueError("N grid must be strictly increasing")
    cache = KfreeCache(p.k)
    variances = np.empty(len(Ns), dtype=np.float64)
    for g, N in enumerate(Ns):
        batch = run_trials(p, N, trials_per_N, mix64(master_seed, g), cache)
        variances[g] = batch.sample_variance
    keep = variances > 0.0
    if not keep.all():
        dropped = [N for N, ok in zip(Ns, keep) if not ok]
        logger.warning("dropping zero-variance grid points %s from decay fit", dropped)
    if keep.sum() < 2:
        raise ValueError("fewer than 2 nonzero-variance grid points; cannot fit")
    x = np.log(np.array(Ns, dtype=np.float64)[keep])
    y = np.log(variances[keep])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid ** 2)) / ss_tot
    return DecayFit(Ns, variances, float(slope), float(intercept), r2)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    mean: float
    abs_gap: float
    sample_std: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Batch means against the predicted limit density, per grid N."""
    theta: DensityConstant
    rows: tuple


def convergence_report(p: WalkParams, N_grid: Sequence[int], trials: int,
                       master_seed: int, prime_limit: int = 100_000) -> ConvergenceReport:
    """Means and gaps |mean - theta| along an increasing N grid."""
    Ns = tuple(int(N) for N in N_grid)
    if any(n2 <= n1 for n1, n2 in zip(Ns, Ns[1:])):
        raise ValueError("N grid must be strictly increasing")
    theta = theta_k(p, prime_limit)
    cache = KfreeCache(p.k)
    rows = []
    for g, N in enumerate(Ns):
        batch = run_trials(p, N, trials, mix64(master_seed, g), cache)
        rows.append(ConvergenceRow(N, batch.mean, abs(batch.mean - theta.value),
                                   math.sqrt(batch.sample_variance)))
    return ConvergenceReport(theta, tuple(rows))
