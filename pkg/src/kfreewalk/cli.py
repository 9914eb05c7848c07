"""Command-line front end.

Subcommands: theta, beta, simulate, exact, verify, count, decay.
Flag values beat config-file values beat defaults; the config file is
flat ``key=value`` text (keys are the long flag names without dashes).
All floating-point output uses the shortest round-tripping decimal so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from typing import Optional

import numpy as np

from .constants import WalkParams, beta_k, theta_k
from .counting import count_kfree_ap
from .exactdist import ORACLE_CAP, PAIR_CAP, exact_moments, oracle_full_paths
from .constants import local_density
from .montecarlo import run_trials, variance_decay
from .rng import mix64
from .verify import run_suite


def fmt(x) -> str:
    """Shortest round-trip decimal for floats; empty string for None."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_text(path: str, text: str) -> None:
    """Atomic write: no partial file survives an I/O failure."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".kfreewalk-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


class _Resolver:
    """flags > config file > defaults, with typed config parsing."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, typ=None):
        val = getattr(self.args, key, None)
        if val is None:
            raw = self.config.get(key)
            if raw is None:
                val = default
            else:
                val = (typ or str)(raw)
        if val is None:
            raise SystemExit(f"error: missing required parameter '{key}'")
        return val


def _walk_params(res: _Resolver, need_alpha: bool = True) -> WalkParams:
    alpha = res.get("alpha", 0.5 if not need_alpha else None, float)
    return WalkParams(k=res.get("k", None, int), a=res.get("a", None, int),
                      b=res.get("b", None, int), r=res.get("r", 0, int),
                      alpha=alpha)


def _master_seed(res: _Resolver) -> int:
    seed = res.get("seed", -1, int)
    if seed < 0:
        seed = int.from_bytes(os.urandom(8), "little")
    return seed


def cmd_theta(args) -> int:
    res = _Resolver(args)
    p = _walk_params(res, need_alpha=False)
    limit = res.get("prime_limit", 100_000, int)
    dc = theta_k(p, limit)
    shortcut = math.gcd(p.a, p.b) == 1
    if args.format == "json":
        print(json.dumps({"kind": dc.kind, "value": dc.value,
                          "tail_bound": dc.tail_bound, "prime_limit": limit,
                          "one_over_zeta_shortcut": shortcut}))
    else:
        print(f"theta = {fmt(dc.value)} +- {fmt(dc.tail_bound)}")
        if shortcut:
            print("note: gcd(a,b) = 1, so theta equals 1/zeta(k)")
    return 0


def cmd_beta(args) -> int:
    res = _Resolver(args)
    k = res.get("k", None, int)
    q = res.get("q", None, int)
    r = res.get("r", 0, int)
    limit = res.get("prime_limit", 100_000, int)
    dc = beta_k(k, q, r, limit)
    if args.format == "json":
        print(json.dumps({"kind": dc.kind, "value": dc.value,
                          "tail_bound": dc.tail_bound, "prime_limit": limit}))
    else:
        print(f"beta = {fmt(dc.value)} +- {fmt(dc.tail_bound)}")
    return 0


def cmd_simulate(args) -> int:
    res = _Resolver(args)
    p = _walk_params(res)
    N = res.get("N", None, int)
    trials = res.get("trials", 16, int)
    seed = _master_seed(res)
    limit = res.get("prime_limit", 100_000, int)
    batch = run_trials(p, N, trials, seed)
    theta = theta_k(p, limit)
    summary = {
        "N": N, "trials": trials, "master_seed": seed,
        "mean": batch.mean, "sample_variance": batch.sample_variance,
        "theta": theta.value, "theta_tail_bound": theta.tail_bound,
        "abs_gap": abs(batch.mean - theta.value),
    }
    if args.out:
        lines = ["trial,seed,sbar"]
        for t, sbar in enumerate(batch.sbar_values):
            lines.append(f"{t},{mix64(seed, t)},{fmt(float(sbar))}")
        _write_text(args.out, "\n".join(lines) + "\n")
    print(json.dumps(summary))
    return 0


def cmd_exact(args) -> int:
    res = _Resolver(args)
    p = _walk_params(res)
    N = res.get("N", None, int)
    with_var = bool(args.variance)
    if with_var and N > PAIR_CAP:
        print(f"error: --variance needs N <= {PAIR_CAP}, got {N}", file=sys.stderr)
        return 2
    em = exact_moments(p, N, with_variance=with_var)
    f_i = [local_density(p, i) for i in range(1, N + 1)]
    gaps = [float(e) - f for e, f in zip(em.e_xi, f_i)]
    # scaled gap statistic: |gap| * sqrt(alpha(1-alpha)) * i^(1/2 - 1/k)
    scale = math.sqrt(p.alpha * (1 - p.alpha))
    stat = max(abs(g) * scale * i ** (0.5 - 1.0 / p.k)
               for i, g in enumerate(gaps, 1))
    lines = ["i,e_xi,f_i,gap"]
    for i in range(N):
        lines.append(f"{i + 1},{fmt(float(em.e_xi[i]))},{fmt(f_i[i])},{fmt(gaps[i])}")
    lines.append(f"# e_sbar={fmt(em.e_sbar)}")
    if with_var:
        lines.append(f"# v_sbar={fmt(em.v_sbar)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    summary = {"N": N, "e_sbar": em.e_sbar, "v_sbar": em.v_sbar,
               "max_scaled_gap": stat}
    if args.oracle:
        if N > ORACLE_CAP:
            print(f"error: --oracle needs N <= {ORACLE_CAP}", file=sys.stderr)
            return 2
        orc = oracle_full_paths(p, N)
        mismatch = max(float(np.max(np.abs(em.e_xi - orc.e_xi))),
                       abs(em.e_sbar - orc.e_sbar))
        if em.v_sbar is not None and orc.v_sbar is not None:
            mismatch = max(mismatch, abs(em.v_sbar - orc.v_sbar))
        summary["oracle_mismatch"] = mismatch
        print(json.dumps(summary))
        if mismatch > 1e-10:
            print(f"error: oracle mismatch {mismatch:.3e} > 1e-10", file=sys.stderr)
            return 1
        return 0
    print(json.dumps(summary))
    return 0


def cmd_verify(args) -> int:
    results = run_suite(quick=bool(args.quick), inject_fault=bool(args.inject_fault))
    failures = sum(1 for r in results if not r.passed)
    print(json.dumps({"checks": [{"name": r.name, "pass": r.passed, "detail": r.detail}
                                 for r in results],
                      "failures": failures}))
    return failures


def cmd_count(args) -> int:
    res = _Resolver(args)
    N = res.get("N", None, int)
    k = res.get("k", None, int)
    q = res.get("q", 1, int)
    r = res.get("r", 0, int)
    rep = count_kfree_ap(N, k, q, r)
    lines = ["N,k,q,r,count,density,predicted,residual",
             f"{rep.N},{rep.k},{rep.q},{rep.r},{rep.count},{fmt(rep.density)},"
             f"{fmt(rep.predicted)},{fmt(rep.residual)}"]
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_decay(args) -> int:
    res = _Resolver(args)
    p = _walk_params(res)
    grid = [int(x) for x in str(res.get("N", None)).split(",")]
    trials = res.get("trials", 64, int)
    seed = _master_seed(res)
    fit = variance_decay(p, grid, trials, seed)
    lines = ["N,variance"]
    for N, v in zip(fit.Ns, fit.variances):
        lines.append(f"{N},{fmt(float(v))}")
    text = "\n".join(lines) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    print(json.dumps({"slope": fit.slope, "intercept": fit.intercept,
                      "r_squared": fit.r_squared, "trials": trials,
                      "master_seed": seed}))
    return 0


def _add_common(sp, *, walk=False, seeded=False):
    sp.add_argument("--config", help="key=value config file (flags win)")
    sp.add_argument("--out", help="output CSV path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    if walk:
        sp.add_argument("-k", type=int, help="k-free exponent (k >= 2)")
        sp.add_argument("-a", type=int, help="first step size")
        sp.add_argument("-b", type=int, help="second step size")
        sp.add_argument("-r", type=int, help="starting position (default 0)")
        sp.add_argument("--alpha", type=float, help="probability of step a")
    if seeded:
        sp.add_argument("--trials", type=int, help="number of independent trials")
        sp.add_argument("--seed", type=int, help="64-bit master seed (default: entropy)")
    sp.add_argument("--prime-limit", dest="prime_limit", type=int,
                    help="Euler product / zeta truncation (default 100000)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kfreewalk",
                                 description="k-free numbers along two-step random walks")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("theta", help="limit density of k-free hits for a walk")
    _add_common(sp, walk=True)
    sp.set_defaults(fn=cmd_theta)

    sp = sub.add_parser("beta", help="density of k-free numbers in r mod q")
    sp.add_argument("-q", type=int, help="modulus")
    sp.add_argument("-k", type=int)
    sp.add_argument("-r", type=int)
    _add_common(sp)
    sp.set_defaults(fn=cmd_beta)

    sp = sub.add_parser("simulate", help="Monte Carlo trials of the walk experiment")
    _add_common(sp, walk=True, seeded=True)
    sp.add_argument("-N", type=int, help="walk length")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("exact", help="exact per-step expectations and moments")
    _add_common(sp, walk=True)
    sp.add_argument("-N", type=int, help="number of steps")
    sp.add_argument("--variance", action="store_true", help="also compute V(Sbar)")
    sp.add_argument("--oracle", action="store_true",
                    help="cross-check against full path enumeration (N <= 20)")
    sp.set_defaults(fn=cmd_exact)

    sp = sub.add_parser("verify", help="run the pinned verification suite")
    sp.add_argument("--quick", action="store_true", help="reduced grids, < 10 s")
    sp.add_argument("--inject-fault", dest="inject_fault", action="store_true",
                    help="flip one sieve bit (the suite must then fail)")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("count", help="count k-free numbers (optionally in r mod q)")
    sp.add_argument("-N", type=int)
    sp.add_argument("-k", type=int)
    sp.add_argument("-q", type=int)
    sp.add_argument("-r", type=int)
    _add_common(sp)
    sp.set_defaults(fn=cmd_count)

    sp = sub.add_parser("decay", help="variance decay fit over an N grid")
    _add_common(sp, walk=True, seeded=True)
    sp.add_argument("-N", help="comma-separated N grid, e.g. 1024,2048,4096,8192")
    sp.set_defaults(fn=cmd_decay)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
