"""k-free numbers along two-step random walks.

Exact Euler-product densities, exact moments of the hit proportion,
reproducible Monte Carlo experiments, and classical sieve baselines.
"""

from .arith import (CertifiedValue, KfreeCache, SieveTable, gcd, iroot,
                    is_kfree, kfree_sieve, mobius_sieve, zeta_k)
from .constants import (DensityConstant, MeanDensity, WalkParams, beta_k,
                        kfree_main_term, local_density, mean_local_density,
                        one_over_zeta, theta_k)
from .counting import CountReport, count_kfree, count_kfree_ap
from .exactdist import (BinomialPMF, ExactMoments, RestrictedSum,
                        binom_congruence_sum, binom_pmf, exact_moments,
                        expect_hit, expect_hit_pair, kfree_binom_sum,
                        oracle_full_paths)
from .kernels import BACKEND
from .montecarlo import (ConvergenceReport, ConvergenceRow, DecayFit,
                         TrialBatch, convergence_report, run_trials,
                         simulate_walk, variance_decay)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BinomialPMF", "CertifiedValue", "ConvergenceReport",
    "ConvergenceRow", "CountReport", "DecayFit", "DensityConstant",
    "ExactMoments", "KfreeCache", "MeanDensity", "RestrictedSum",
    "SieveTable", "TrialBatch", "WalkParams", "beta_k",
    "binom_congruence_sum", "binom_pmf", "convergence_report", "count_kfree",
    "count_kfree_ap", "exact_moments", "expect_hit", "expect_hit_pair",
    "gcd", "iroot", "is_kfree", "kfree_binom_sum", "kfree_main_term",
    "kfree_sieve", "local_density", "mean_local_density", "mobius_sieve",
    "one_over_zeta", "oracle_full_paths", "run_trials", "simulate_walk",
    "theta_k", "variance_decay", "zeta_k",
]
