"""Counting experiments: exact psi(x,y), curve-order friability counts
psi_E(x,y) and psi_{E,z}(x,y), divisibility counts pi_E(x;d), the E7/E11
Chebyshev race, and the gamma-tilde error-term estimator, plus the on-disk
order cache that lets the long sweeps resume and be shared between
experiments.

Friability is strict everywhere: n counts as y-friable iff P+(n) < y, and
every serialized output carries the convention marker.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arith, cmcount, dickman
from .ecm import CatalogCurve, catalog_curve
from .errors import CapacityError, DomainError, UsageError

PSI_BUDGET = 10**9
CONVENTION = "Pplus_strict"
CACHE_SEGMENT = 1 << 17


@dataclass(frozen=True)
class FriabilityTester:
    """Strict y-friability: accepts n iff P+(n) < y.  n = 1 is accepted
    (its largest prime factor is an empty maximum); callers that must
    exclude 1 (no prime divisor exists) do so themselves."""

    y: int
    primes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.y < 2:
            raise UsageError(f"friability bound y={self.y} must be >= 2")
        if not self.primes:
            object.__setattr__(self, "primes", tuple(arith.primes_below(self.y)))

    def __call__(self, n: int) -> bool:
        if n < 1:
            raise UsageError(f"friability test needs n >= 1, got {n}")
        for p in self.primes:
            if p * p > n:
                break
            while n % p == 0:
                n //= p
        # remaining n is 1, a prime, or has all factors >= y; n < y forces prime
        return n < self.y


def psi_exact(x: int, y: int) -> int:
    """Exact Psi(x, y) = #{n <= x : P+(n) < y} by segmented divide-out:
    each segment divides every entry by the full power of each prime < y
    and counts the positions reduced to 1."""
    if x < 1:
        raise UsageError(f"x={x} must be >= 1")
    if y < 2:
        raise UsageError(f"y={y} must be >= 2")
    if x > PSI_BUDGET:
        raise CapacityError(f"psi_exact budget: x={x} > {PSI_BUDGET}")
    if y > x:
        return x
    primes = arith.primes_below(y)
    seg = 1 << 20
    count = 0
    for lo in range(1, x + 1, seg):
        hi = min(lo + seg, x + 1)
        rem = np.arange(lo, hi, dtype=np.int64)
        for p in primes:
            first = ((lo + p - 1) // p) * p - lo
            idx = np.arange(first, hi - lo, p)
            while idx.size:
                rem[idx] //= p
                idx = idx[rem[idx] % p == 0]
        count += int(np.count_nonzero(rem == 1))
    return count


def good_primes(E: CatalogCurve, x: int) -> list[int]:
    return [p for p in arith.cached_primes(x) if E.curve.has_good_reduction(p)]


def psi_E(x: int, y: int, E: CatalogCurve, order_fn) -> int:
    """#{p <= x good : P+(|E(F_p)|) < y}."""
    tester = FriabilityTester(y)
    return sum(1 for p in good_primes(E, x) if tester(order_fn(p)))


def psi_E_z(x: int, y: int, z: int, E: CatalogCurve, order_fn) -> int:
    """#{n <= x : P+(n) < y and some good prime p | n has P+(|E(F_p)|) < z}.
    n = 1 never counts: it has no prime divisor (P-(1) = infinity)."""
    if not (2 <= z and 2 <= y):
        raise UsageError("bounds must be >= 2")
    if x > 10**8:
        raise CapacityError(f"psi_E_z smallest-prime-factor sieve guard: x={x}")
    order_tester = FriabilityTester(z)
    marked: dict[int, bool] = {}

    def prime_hits(p: int) -> bool:
        if p not in marked:
            marked[p] = E.curve.has_good_reduction(p) and order_tester(order_fn(p))
        return marked[p]

    spf = _spf_sieve(x)
    count = 0
    for n in range(2, x + 1):
        m = n
        friable = True
        hit = False
        while m > 1:
            p = int(spf[m])
            if p >= y:
                friable = False
                break
            if not hit and prime_hits(p):
                hit = True
            while m % p == 0:
                m //= p
        if friable and hit:
            count += 1
    return count


def _spf_sieve(x: int) -> np.ndarray:
    spf = np.zeros(x + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, x + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    return spf


def pi_E_d(x: int, d: int, E: CatalogCurve, order_fn) -> int:
    """#{p <= x good : d divides |E(F_p)|}."""
    if d < 1:
        raise UsageError(f"d={d} must be >= 1")
    return sum(1 for p in good_primes(E, x) if order_fn(p) % d == 0)


class SeriesKind(enum.Enum):
    PSI = "psi"
    PSI_E = "psi_e"
    PSI_E_Z = "psi_e_z"
    PI_E_D = "pi_e_d"
    RACE = "race"
    GAMMA_TILDE = "gamma_tilde"
    RHO = "rho"


@dataclass
class CensusSeries:
    kind: SeriesKind
    params: dict
    rows: list[tuple[int, float]]

    def __post_init__(self):
        xs = [x for x, _ in self.rows]
        if xs != sorted(set(xs)):
            raise UsageError("series rows must be strictly increasing in x")

    def header(self) -> str:
        items = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        sep = "," if items else ""
        return f"# {self.kind.value}{sep}{items},convention={CONVENTION}"

    def to_csv(self) -> str:
        lines = [self.header(), "x,value"]
        for x, v in self.rows:
            lines.append(f"{x},{v}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind.value,
                "params": {k: self.params[k] for k in sorted(self.params)},
                "convention": CONVENTION,
                "rows": [[x, v] for x, v in self.rows],
            },
            indent=None,
            separators=(",", ":"),
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CensusSeries":
        obj = json.loads(text)
        if obj.get("convention") != CONVENTION:
            raise UsageError(f"unknown convention {obj.get('convention')!r}")
        return cls(
            kind=SeriesKind(obj["kind"]),
            params=obj["params"],
            rows=[(r[0], r[1]) for r in obj["rows"]],
        )


def race(
    E1: CatalogCurve,
    E2: CatalogCurve,
    y: int,
    checkpoints: list[int],
    order_fn1=None,
    order_fn2=None,
) -> CensusSeries:
    """Pointwise psi_E1(x,y) - psi_E2(x,y) at the given checkpoints, from one
    shared sweep over the primes up to max(checkpoints)."""
    checkpoints = sorted(set(checkpoints))
    if not checkpoints:
        return CensusSeries(SeriesKind.RACE, {"e1": E1.name, "e2": E2.name, "y": y}, [])
    order_fn1 = order_fn1 if order_fn1 is not None else cmcount.order_fn_for(E1)
    order_fn2 = order_fn2 if order_fn2 is not None else cmcount.order_fn_for(E2)
    tester = FriabilityTester(y)
    top = checkpoints[-1]
    rows = []
    i = 0
    c1 = c2 = 0
    for p in arith.cached_primes(top):
        while i < len(checkpoints) and p > checkpoints[i]:
            rows.append((checkpoints[i], c1 - c2))
            i += 1
        if E1.curve.has_good_reduction(p) and tester(order_fn1(p)):
            c1 += 1
        if E2.curve.has_good_reduction(p) and tester(order_fn2(p)):
            c2 += 1
    while i < len(checkpoints):
        rows.append((checkpoints[i], c1 - c2))
        i += 1
    return CensusSeries(SeriesKind.RACE, {"e1": E1.name, "e2": E2.name, "y": y}, rows)


def psi_K(x: int, K: arith.ImagQuadField) -> int:
    """Number of integral ideals of O_K with norm <= x:
    sum_{d <= x} chi(d) floor(x/d) since #ideals of norm n = sum_{d|n} chi(d)."""
    m = -K.disc  # chi is periodic mod |disc|
    table = np.array([K.chi(r) for r in range(m)], dtype=np.int64)
    d = np.arange(1, x + 1, dtype=np.int64)
    return int(np.sum(table[d % m] * (x // d)))


def psi_K_friable(x: int, y: int, K: arith.ImagQuadField) -> int:
    """Number of ideals with y-friable norm <= x (the norm, as an integer,
    has P+ < y), by depth-first search over the rational primes.  A split p
    contributes k+1 ideals of norm p^k, inert p one ideal of norm p^(2k),
    ramified p one ideal of norm p^k."""
    ps = [p for p in arith.primes_below(min(y, x + 1))]
    info = []
    for p in ps:
        c = K.chi(p)
        if c == -1 and p * p > x:
            continue  # inert primes only appear with norm p^2
        info.append((p, c))

    def dfs(i: int, budget: int) -> int:
        total = 1  # exponent-0 assignment for all remaining primes
        for j in range(i, len(info)):
            p, c = info[j]
            if p > budget:
                break  # info is ascending in p, and step >= p
            step = p * p if c == -1 else p
            if step > budget:
                continue  # inert steps are p^2, not monotone along the list
            norm = step
            k = 1
            while norm <= budget:
                mult = (k + 1) if c == 1 else 1
                total += mult * dfs(j + 1, budget // norm)
                norm *= step
                k += 1
        return total

    return dfs(0, x)


class GammaTildeMode(enum.Enum):
    FIELD_IDEALS = "field_ideals"
    CURVE = "curve"


def gamma_tilde(mode: GammaTildeMode, target, x: int, y: int, order_fn=None) -> float:
    """Dispatch between ideal-count mode (target is a field) and curve mode
    (target is a catalog curve)."""
    if mode == GammaTildeMode.FIELD_IDEALS:
        return gamma_tilde_field(target, x, y)
    if mode == GammaTildeMode.CURVE:
        return gamma_tilde_curve(target, x, y, order_fn)
    raise UsageError(f"unknown gamma_tilde mode {mode!r}")


def gamma_tilde_field(K: arith.ImagQuadField, x: int, y: int) -> float:
    """gamma-tilde in ideal-count mode:
    ((psi_K(x,y)/psi_K(x,inf)) / rho(u) - 1) / (log(u+1)/log y)."""
    return _gamma_tilde(psi_K_friable(x, y, K), psi_K(x, K), x, y)


def gamma_tilde_curve(E: CatalogCurve, x: int, y: int, order_fn=None) -> float:
    """gamma-tilde in curve mode, with psi_E(x,y)/#good primes as the ratio."""
    order_fn = order_fn if order_fn is not None else cmcount.order_fn_for(E)
    gp = good_primes(E, x)
    tester = FriabilityTester(y)
    friable = sum(1 for p in gp if tester(order_fn(p)))
    return _gamma_tilde(friable, len(gp), x, y)


def _gamma_tilde(friable: int, total: int, x: int, y: int) -> float:
    if not (2 <= y <= x):
        raise UsageError("gamma_tilde needs 2 <= y <= x")
    if total == 0:
        raise DomainError("empty census, cannot form the ratio")
    u = math.log(x) / math.log(y)
    r, underflow = dickman.rho_clipped(u)
    if underflow or r == 0.0:
        raise DomainError(f"rho({u}) underflows; gamma_tilde undefined")
    return (friable / total / r - 1.0) / (math.log(u + 1) / math.log(y))


# --- on-disk order cache ---


def _cache_path(cache_dir: Path, curve_name: str, seg_lo: int) -> Path:
    return cache_dir / f"{curve_name}.{seg_lo:010d}.orders"


def _compute_segment(curve_name: str, seg_lo: int, seg_hi: int, seed: int) -> list[tuple[int, int]]:
    cat = catalog_curve(curve_name)
    fn = cmcount.order_fn_for(cat, seed)
    out = []
    for p in arith.cached_primes(seg_hi):
        if p < seg_lo:
            continue
        if cat.curve.has_good_reduction(p):
            out.append((p, fn(p)))
    return out


def _load_segment(path: Path) -> dict[int, int]:
    orders = {}
    with path.open() as fh:
        for line in fh:
            parts = line.split()
            if len(parts) != 2:
                raise UsageError(f"corrupt cache line in {path}: {line!r}")
            orders[int(parts[0])] = int(parts[1])
    return orders


class OrderCache:
    """Per-(curve, segment) files of "p order" lines, ascending p, decimal,
    append-only: a complete segment file is bit-exact reproducible, and an
    interrupted run just recomputes the one incomplete segment."""

    def __init__(self, cache_dir: str | os.PathLike, seed: int = 0, workers: int = 1):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.seed = seed
        self.workers = max(1, workers)

    def orders(self, cat: CatalogCurve, x: int) -> dict[int, int]:
        """All good-prime orders for p <= x, computing and persisting any
        missing segments."""
        out: dict[int, int] = {}
        todo = []
        for lo in range(0, x + 1, CACHE_SEGMENT):
            hi = min(lo + CACHE_SEGMENT, x + 1)
            path = _cache_path(self.cache_dir, cat.name, lo)
            if path.exists():
                for p, n in _load_segment(path).items():
                    if p <= x:
                        out[p] = n
            else:
                todo.append((lo, hi, path))
        results = self._compute(cat.name, todo)
        for (lo, hi, path), pairs in zip(todo, results):
            # only full segments are persisted, so every cache file is
            # complete and bit-exact regardless of the x it was built for
            if hi - lo == CACHE_SEGMENT:
                self._write(path, pairs)
            for p, n in pairs:
                if p <= x:
                    out[p] = n
        return out

    def _compute(self, curve_name: str, todo):
        if not todo:
            return []
        if self.workers == 1 or len(todo) == 1:
            return [_compute_segment(curve_name, lo, hi, self.seed) for lo, hi, _ in todo]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            futs = [
                pool.submit(_compute_segment, curve_name, lo, hi, self.seed)
                for lo, hi, _ in todo
            ]
            return [f.result() for f in futs]

    def _write(self, path: Path, pairs: list[tuple[int, int]]) -> None:
        tmp = path.with_suffix(".tmp")
        with tmp.open("w") as fh:
            for p, n in pairs:
                fh.write(f"{p} {n}\n")
        tmp.replace(path)

    def order_fn(self, cat: CatalogCurve, x: int):
        table = self.orders(cat, x)
        def fn(p: int) -> int:
            return table[p]
        return fn
