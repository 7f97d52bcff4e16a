"""Command-line front end.

Subcommands: ecm (one-curve stage 1), split (NFS splitting step), alpha (the
constants table), census (counting experiments, CSV/JSON emission).

Exit codes: 0 success, 1 negative result (FAIL / exhaustion / race violation),
2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

from . import arith, census, dickman, ecm, lfunc
from .errors import CapacityError, EcsmoothError, UsageError

CACHE_ENV = "ECSMOOTH_CACHE_DIR"
DEFAULT_CACHE = "~/.cache/ecsmooth"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

CM_CURVE_BY_D = {
    1: "e1", 2: "e8000", 3: "e3", 7: "e7", 11: "e11",
    19: "e19", 43: "e43", 67: "e67", 163: "e163",
}


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    cfg = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line without '=': {raw!r}")
        k, v = line.split("=", 1)
        cfg[k.strip().replace("-", "_")] = v.strip()
    return cfg


def _merge_config(args: argparse.Namespace, cfg: dict[str, str]) -> None:
    """Config supplies values only where the command line left the default."""
    for k, v in cfg.items():
        if not hasattr(args, k):
            continue
        current = getattr(args, k)
        if current == _parser_default(args, k):
            typ = type(current) if current is not None else str
            setattr(args, k, typ(v) if typ is not bool else v.lower() in ("1", "true", "yes"))


_DEFAULTS: dict[str, object] = {}


def _parser_default(args: argparse.Namespace, key: str):
    return _DEFAULTS.get((args.command, key))


def _record_defaults(sub: argparse.ArgumentParser, command: str) -> None:
    for action in sub._actions:
        if action.dest != "help":
            _DEFAULTS[(command, action.dest)] = action.default


def _cache_dir(args) -> str:
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    return os.environ.get(CACHE_ENV, os.path.expanduser(DEFAULT_CACHE))


def cmd_ecm(args) -> int:
    if args.n < 2:
        raise UsageError("N must be >= 2")
    cat = ecm.catalog_curve(args.curve)
    t0 = time.perf_counter()
    out = ecm.ecm_one_curve(args.n, cat, args.u, args.v, exact_m=args.exact_m)
    dt = time.perf_counter() - t0
    b, c = ecm.EcmParams(args.u, args.v).bounds(args.n)
    ops = sum(e for _, e in ecm.stage1_exponent_plan(c, args.n))
    if out.ok:
        print(f"Factor({out.factor})  B={b} C={c} scalar_steps={ops} time={dt:.3f}s")
        return EXIT_OK
    print(f"FAIL  B={b} C={c} scalar_steps={ops} time={dt:.3f}s")
    return EXIT_NEGATIVE


def cmd_split(args) -> int:
    if not arith.is_prime(args.q):
        raise UsageError(f"q={args.q} is not prime")
    u = v = ecm.auto_uv(args.q) if args.auto else None
    if not args.auto:
        if args.u is None or args.v is None:
            raise UsageError("provide -u and -v, or --auto")
        u, v = args.u, args.v
    t0 = time.perf_counter()
    res = ecm.split_step(args.q, args.g, args.h, u, v, seed=args.seed, max_iters=args.max_iters)
    dt = time.perf_counter() - t0
    if res is None:
        print(f"EXHAUSTED after {args.max_iters} iterations  u={u:.4f} v={v:.4f} time={dt:.3f}s")
        return EXIT_NEGATIVE
    e, factor = res
    n = pow(args.g, e, args.q) * args.h % args.q
    print(f"e={e} n={n} factor={factor}  u={u:.4f} v={v:.4f} time={dt:.3f}s")
    return EXIT_OK


def _alpha_columns(ds, ell_bound, p_bound):
    cols = []
    for d in ds:
        cat = ecm.catalog_curve(CM_CURVE_BY_D[d])
        rep = lfunc.alpha_report(
            cat, ell_bound=ell_bound, empirical_ell_bound=10**4, p_bound=p_bound
        )
        cols.append(rep)
    return cols


def cmd_alpha(args) -> int:
    ds = sorted(CM_CURVE_BY_D) if args.all else [args.d]
    if not args.all and args.d not in CM_CURVE_BY_D:
        raise UsageError(f"unknown discriminant d={args.d}")
    import warnings

    flagged = False
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cols = _alpha_columns(ds, args.ell_bound, args.p_bound)
        flagged = any(issubclass(w.category, lfunc.TruncationWarning) for w in caught)
    rows = [
        ("alpha_tilde", [c.alpha_tilde for c in cols]),
        ("alpha", [c.alpha for c in cols]),
        ("sigma_k", [c.sigma_k for c in cols]),
        ("gamma_k", [c.gamma_k for c in cols]),
        ("difference", [c.difference for c in cols]),
    ]
    if args.csv:
        print("row," + ",".join(f"d={d}" for d in ds))
        for name, vals in rows:
            print(name + "," + ",".join(f"{v:.6f}" for v in vals))
    else:
        head = "{:<12}".format("") + "".join(f"{('d='+str(d)):>10}" for d in ds)
        print(head)
        for name, vals in rows:
            print("{:<12}".format(name) + "".join(f"{v:>10.3f}" for v in vals))
    print(f"# curves: {','.join(CM_CURVE_BY_D[d] for d in ds)}"
          f"  ell_bound={args.ell_bound} p_bound={args.p_bound}"
          + ("  WARNING=truncation_guard" if flagged else ""))
    return EXIT_OK


def _write_series(series: census.CensusSeries, out_base: str) -> None:
    Path(out_base + ".csv").write_text(series.to_csv())
    Path(out_base + ".json").write_text(series.to_json())
    print(f"wrote {out_base}.csv and {out_base}.json ({len(series.rows)} rows)")


def cmd_census(args) -> int:
    cache = census.OrderCache(_cache_dir(args), seed=args.seed, workers=args.workers)
    budget = args.budget
    if args.rho:
        rows = []
        u = 0.0
        while u <= args.max_u + 1e-12:
            rows.append((round(u * 1000), dickman.rho(u)))
            u += args.rho_step
        series = census.CensusSeries(
            census.SeriesKind.RHO,
            {"max_u": args.max_u, "step": args.rho_step, "x_scale": 1000},
            rows,
        )
        _write_series(series, args.out or "rho")
        return EXIT_OK
    if args.race:
        try:
            n1, n2 = args.race.split("-")
            e1, e2 = ecm.catalog_curve(n1), ecm.catalog_curve(n2)
        except ValueError as exc:
            raise UsageError(f"--race wants CURVE-CURVE, got {args.race!r}") from exc
        checkpoints = [x for x in (2**k for k in range(4, 64)) if x <= budget]
        if budget not in checkpoints:
            checkpoints.append(budget)
        try:
            f1 = cache.order_fn(e1, budget)
            f2 = cache.order_fn(e2, budget)
        except CapacityError:
            return EXIT_BUDGET
        series = census.race(e1, e2, args.y, checkpoints, f1, f2)
        _write_series(series, args.out or f"race_{n1}_{n2}_y{args.y}")
        violations = sum(1 for _, v in series.rows if v < 0)
        if violations:
            print(f"race lead changes sign at {violations} checkpoint(s)")
            return EXIT_NEGATIVE
        return EXIT_OK
    if args.kind == "psi":
        if budget > census.PSI_BUDGET:
            print(f"budget {budget} exceeds psi guard {census.PSI_BUDGET}")
            return EXIT_BUDGET
        rows = [(x, census.psi_exact(x, args.y)) for x in _checkpoints(budget)]
        series = census.CensusSeries(census.SeriesKind.PSI, {"y": args.y}, rows)
        _write_series(series, args.out or f"psi_y{args.y}")
        return EXIT_OK
    if args.kind == "psi_e":
        cat = ecm.catalog_curve(args.curve)
        fn = cache.order_fn(cat, budget)
        rows = [(x, census.psi_E(x, args.y, cat, fn)) for x in _checkpoints(budget)]
        series = census.CensusSeries(
            census.SeriesKind.PSI_E, {"curve": cat.name, "y": args.y}, rows
        )
        _write_series(series, args.out or f"psie_{cat.name}_y{args.y}")
        return EXIT_OK
    if args.kind == "gamma_tilde":
        if args.d is not None:
            K = arith.field_for(args.d)
            val = census.gamma_tilde_field(K, budget, args.y)
            label = f"d={args.d}"
        else:
            cat = ecm.catalog_curve(args.curve)
            fn = cache.order_fn(cat, budget)
            val = census.gamma_tilde_curve(cat, budget, args.y, fn)
            label = f"curve={args.curve}"
        u = math.log(budget) / math.log(args.y)
        print(f"gamma_tilde({label}, x={budget}, y={args.y}, u={u:.3f}) = {val:.6f}")
        return EXIT_OK
    raise UsageError("nothing to do: pick a census kind, --race, or --rho")


def _checkpoints(budget: int) -> list[int]:
    cps = [x for x in (2**k for k in range(4, 64)) if x <= budget]
    if budget not in cps:
        cps.append(budget)
    return cps


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ecsmooth", description=__doc__)
    ap.add_argument("--config", help="key=value config file merged under flags")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ecm", help="one-curve ECM stage 1")
    p.add_argument("n", type=int)
    p.add_argument("--curve", default="e8000")
    p.add_argument("-u", type=float, default=3.0)
    p.add_argument("-v", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-m", action="store_true", dest="exact_m")
    p.set_defaults(fn=cmd_ecm)
    _record_defaults(p, "ecm")

    p = sub.add_parser("split", help="NFS splitting step")
    p.add_argument("q", type=int)
    p.add_argument("g", type=int)
    p.add_argument("h", type=int)
    p.add_argument("-u", type=float, default=None)
    p.add_argument("-v", type=float, default=None)
    p.add_argument("--auto", action="store_true", help="u = v = 3^(1/3)(log q/log log q)^(1/3)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=1000, dest="max_iters")
    p.set_defaults(fn=cmd_split)
    _record_defaults(p, "split")

    p = sub.add_parser("alpha", help="constants table")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("-d", type=int)
    p.add_argument("--ell-bound", type=int, default=10**6, dest="ell_bound")
    p.add_argument("--p-bound", type=int, default=10**3, dest="p_bound")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(fn=cmd_alpha)
    _record_defaults(p, "alpha")

    p = sub.add_parser("census", help="counting experiments")
    p.add_argument("kind", nargs="?", choices=["psi", "psi_e", "gamma_tilde"])
    p.add_argument("--race", help="CURVE-CURVE preset, e.g. e7-e11")
    p.add_argument("--rho", action="store_true", help="dump the rho table")
    p.add_argument("--curve", default="e7")
    p.add_argument("-d", type=int, default=None)
    p.add_argument("--y", type=int, default=128)
    p.add_argument("--max-u", type=float, default=20.0, dest="max_u")
    p.add_argument("--rho-step", type=float, default=0.125, dest="rho_step")
    p.add_argument("--budget", type=int, default=10**6)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", dest="cache_dir", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_census)
    _record_defaults(p, "census")

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _load_config(args.config)
        _merge_config(args, cfg)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except EcsmoothError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
