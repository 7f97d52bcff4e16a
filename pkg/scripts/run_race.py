#!/usr/bin/env python3
"""Run the E7/E11 friability race and write the checkpoint series.

Example:
    python scripts/run_race.py --budget 1000000 --y 128 --workers 4
"""

import argparse
import sys

from ecsmooth import census, ecm


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--e1", default="e7")
    ap.add_argument("--e2", default="e11")
    ap.add_argument("--y", type=int, default=128)
    ap.add_argument("--budget", type=int, default=10**6)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--cache-dir", default=".ecsmooth-cache")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    c1, c2 = ecm.catalog_curve(args.e1), ecm.catalog_curve(args.e2)
    cache = census.OrderCache(args.cache_dir, seed=args.seed, workers=args.workers)
    f1 = cache.order_fn(c1, args.budget)
    f2 = cache.order_fn(c2, args.budget)
    cps = [x for x in (2**k for k in range(4, 64)) if x <= args.budget]
    if args.budget not in cps:
        cps.append(args.budget)
    series = census.race(c1, c2, args.y, cps, f1, f2)
    base = args.out or f"race_{args.e1}_{args.e2}_y{args.y}"
    with open(base + ".csv", "w") as fh:
        fh.write(series.to_csv())
    with open(base + ".json", "w") as fh:
        fh.write(series.to_json())
    lead_ok = all(v >= 0 for _, v in series.rows)
    for x, v in series.rows:
        print(f"{x:>12}  {v:>8}")
    print(f"{args.e1} always ahead: {lead_ok}")
    return 0 if lead_ok else 1


if __name__ == "__main__":
    sys.exit(main())
