#!/usr/bin/env python3
"""Reproduce the nine-field constants table (alpha-tilde, alpha, Sigma_K,
gamma_K, difference) and optionally dump per-ell valuation comparisons.

Example:
    python scripts/run_alpha_table.py --per-ell 20
"""

import argparse
import sys

from ecsmooth import cli as ecli
from ecsmooth import ecm, lfunc


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ell-bound", type=int, default=10**6)
    ap.add_argument("--p-bound", type=int, default=10**3)
    ap.add_argument("--per-ell", type=int, default=0,
                    help="also print theoretical vs empirical valuations for ell below this")
    args = ap.parse_args()

    rc = ecli.main(["alpha", "--all",
                    "--ell-bound", str(args.ell_bound),
                    "--p-bound", str(args.p_bound)])
    if args.per_ell:
        for d in sorted(ecli.CM_CURVE_BY_D):
            cat = ecm.catalog_curve(ecli.CM_CURVE_BY_D[d])
            rep = lfunc.alpha_report(cat, ell_bound=args.ell_bound,
                                     p_bound=args.p_bound,
                                     with_empirical=False,
                                     per_ell_limit=args.per_ell)
            print(f"\nd={d} ({cat.name}): ell, E[val] theory, avg val observed")
            for ell, theo, emp in rep.per_ell:
                print(f"  {ell:>5}  {theo:.5f}  {emp:.5f}")
    return rc


if __name__ == "__main__":
    sys.exit(main())
