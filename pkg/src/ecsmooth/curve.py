"""Elliptic curve group law over Z/NZ with divisor surfacing, plus two
independent group-order oracles over prime fields (naive enumeration and
baby-step/giant-step).

The group law is implemented with the affine chord-and-tangent formulas and
explicit inversion attempts: a failed inversion is exactly the event that
surfaces a factor of a composite modulus, so complete projective formulas
would defeat the purpose.  The projective triple is kept for I/O and for the
neutral element (0:1:0).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import arith
from .errors import AmbiguityError, BadReductionError, CapacityError, UsageError

NAIVE_COUNT_LIMIT = 10**7


@dataclass(frozen=True)
class WeierstrassCurve:
    """Long Weierstrass model y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6
    over the integers, with |discriminant| carried alongside."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    disc: int

    @classmethod
    def from_coeffs(cls, a1: int, a2: int, a3: int, a4: int, a6: int) -> "WeierstrassCurve":
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        delta = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if delta == 0:
            raise UsageError("singular Weierstrass equation (discriminant 0)")
        return cls(a1, a2, a3, a4, a6, abs(delta))

    def rhs(self, x: int) -> int:
        return x**3 + self.a2 * x * x + self.a4 * x + self.a6

    def has_good_reduction(self, p: int) -> bool:
        return self.disc % p != 0


@dataclass(frozen=True)
class ProjPoint:
    """Projective triple (X:Y:Z) with a common modulus N; (0:1:0) is neutral."""

    x: int
    y: int
    z: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise UsageError("point modulus must be >= 2")

    @classmethod
    def neutral(cls, n: int) -> "ProjPoint":
        return cls(0, 1 % n, 0, n)

    @classmethod
    def affine(cls, x: int, y: int, n: int) -> "ProjPoint":
        return cls(x % n, y % n, 1 % n, n)

    @property
    def is_neutral_form(self) -> bool:
        return self.z % self.modulus == 0


@dataclass(frozen=True)
class AddOutcome:
    """Either a point or a nontrivial divisor of the modulus, never both."""

    point: ProjPoint | None = None
    divisor: int | None = None

    @property
    def is_point(self) -> bool:
        return self.point is not None


class _Divisor(Exception):
    def __init__(self, g: int):
        self.g = g


def _inv(a: int, n: int) -> int:
    inv, g = arith.inverse_or_divisor(a, n)
    if inv is None:
        raise _Divisor(g)
    return inv


def _to_affine(P: ProjPoint, n: int) -> tuple[int, int] | None:
    """Normalized affine pair, None for the neutral element.  A failed Z
    normalization is itself a divisor event."""
    z = P.z % n
    if z == 0:
        return None
    zi = _inv(z, n)
    return (P.x * zi % n, P.y * zi % n)


def _neg_y(E: WeierstrassCurve, x: int, y: int, n: int) -> int:
    return (-y - E.a1 * x - E.a3) % n


def _affine_add(E: WeierstrassCurve, n: int, P, Q):
    """Chord-and-tangent on affine pairs (None = neutral); raises _Divisor."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y2 == _neg_y(E, x1, y1, n):
            return None
        if y1 == y2:
            num = (3 * x1 * x1 + 2 * E.a2 * x1 + E.a4 - E.a1 * y1) % n
            den = (2 * y1 + E.a1 * x1 + E.a3) % n
        else:
            # distinct mod n yet equal x: the chord denominator vanishes
            num, den = (y2 - y1) % n, 0
    else:
        num, den = (y2 - y1) % n, (x2 - x1) % n
    lam = num * _inv(den, n) % n
    x3 = (lam * lam + E.a1 * lam - E.a2 - x1 - x2) % n
    y3 = (lam * (x1 - x3) - y1 - E.a1 * x3 - E.a3) % n
    return (x3, y3)


def _affine_mul(E: WeierstrassCurve, n: int, k: int, P):
    R = None
    for bit in bin(k)[2:]:
        R = _affine_add(E, n, R, R)
        if bit == "1":
            R = _affine_add(E, n, R, P)
    return R


def _wrap(P, n: int) -> AddOutcome:
    if P is None:
        return AddOutcome(point=ProjPoint.neutral(n))
    return AddOutcome(point=ProjPoint.affine(P[0], P[1], n))


def ec_add(E: WeierstrassCurve, n: int, P: ProjPoint, Q: ProjPoint) -> AddOutcome:
    """P + Q mod n, or the divisor surfaced by the first failed inversion."""
    if P.modulus != n or Q.modulus != n:
        raise UsageError("point moduli do not match the ambient modulus")
    try:
        return _wrap(_affine_add(E, n, _to_affine(P, n), _to_affine(Q, n)), n)
    except _Divisor as d:
        return AddOutcome(divisor=d.g)


def ec_scalar_mul(E: WeierstrassCurve, n: int, k: int, P: ProjPoint) -> AddOutcome:
    """[k]P mod n by double-and-add, or the first divisor encountered."""
    if k < 0:
        raise UsageError("scalar must be nonnegative")
    if P.modulus != n:
        raise UsageError("point modulus does not match the ambient modulus")
    try:
        return _wrap(_affine_mul(E, n, k, _to_affine(P, n)), n)
    except _Divisor as d:
        return AddOutcome(divisor=d.g)


def hasse_interval(p: int) -> tuple[int, int]:
    """[ceil(p+1-2 sqrt p), floor(p+1+2 sqrt p)], always containing p+1."""
    s = math.isqrt(4 * p)  # floor(2 sqrt p)
    lo = p + 1 - s
    hi = p + 1 + s
    return lo, hi


def naive_count(E: WeierstrassCurve, p: int) -> int:
    """|E(F_p)| by enumerating x and counting y solutions."""
    if not arith.is_prime(p):
        raise UsageError(f"{p} is not prime")
    if not E.has_good_reduction(p):
        raise BadReductionError(f"bad reduction at {p}")
    if p > NAIVE_COUNT_LIMIT:
        raise CapacityError(f"naive_count guard: p={p} > {NAIVE_COUNT_LIMIT}")
    if p <= 3:
        count = 1
        for x in range(p):
            for y in range(p):
                if (y * y + E.a1 * x * y + E.a3 * y - E.rhs(x)) % p == 0:
                    count += 1
        return count
    count = 1
    half = (p - 1) // 2
    for x in range(p):
        # complete the square: (2y + a1 x + a3)^2 = 4 rhs(x) + (a1 x + a3)^2
        disc = (4 * E.rhs(x) + (E.a1 * x + E.a3) ** 2) % p
        if disc == 0:
            count += 1
        elif pow(disc, half, p) == 1:
            count += 2
    return count


# --- fast F_p helpers on a short Weierstrass model (p > 3) ---


def short_model(E: WeierstrassCurve, p: int) -> tuple[int, int]:
    """Coefficients (A, B) of an F_p-isomorphic model y^2 = x^3 + Ax + B."""
    b2 = E.a1 * E.a1 + 4 * E.a2
    b4 = 2 * E.a4 + E.a1 * E.a3
    b6 = E.a3 * E.a3 + 4 * E.a6
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    return (-27 * c4) % p, (-54 * c6) % p


def sw_add(p: int, A: int, P, Q):
    """Affine addition on y^2 = x^3 + Ax + B over F_p (None = neutral)."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return None
        lam = (3 * x1 * x1 + A) * pow(2 * y1, p - 2, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, p - 2, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return (x3, (lam * (x1 - x3) - y1) % p)


def sw_mul(p: int, A: int, k: int, P):
    R = None
    if k < 0:
        k, P = -k, sw_neg(p, P)
    while k:
        if k & 1:
            R = sw_add(p, A, R, P)
        k >>= 1
        if k:
            P = sw_add(p, A, P, P)
    return R


def sw_neg(p: int, P):
    if P is None:
        return None
    return (P[0], (-P[1]) % p)


def sw_random_point(p: int, A: int, B: int, rng: random.Random):
    """Uniform-enough random affine point on y^2 = x^3 + Ax + B over F_p."""
    while True:
        x = rng.randrange(p)
        rhs = (x * x % p * x + A * x + B) % p
        y = arith.sqrt_mod(rhs, p)
        if y is not None:
            if y and rng.getrandbits(1):
                y = p - y
            return (x, y)


def _point_order(p: int, A: int, P, k: int) -> int:
    """Exact order of P given a multiple k of the order ([k]P = O)."""
    order = k
    for q in _distinct_prime_factors(k):
        while order % q == 0 and sw_mul(p, A, order // q, P) is None:
            order //= q
    return order


def _distinct_prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def _bsgs_annihilator(p: int, A: int, P) -> int:
    """Some k in the Hasse interval with [k]P = O, via baby-step/giant-step."""
    lo, hi = hasse_interval(p)
    width = hi - lo + 1
    m = math.isqrt(width) + 1
    baby = {}
    R = None
    for j in range(m):
        baby.setdefault(R, j)
        R = sw_add(p, A, R, P)
    # find j, i with [lo + i*m]P = [j]P  =>  k = lo + i*m - j
    G = sw_mul(p, A, lo, P)
    step = sw_mul(p, A, m, P)
    i = 0
    while lo + i * m - (m - 1) <= hi:
        if G in baby:
            k = lo + i * m - baby[G]
            if k >= 1:  # k = 0 happens for tiny p where the baby table spans lo
                return k
        G = sw_add(p, A, G, step)
        i += 1
    raise ArithmeticError("BSGS found no annihilator in the Hasse interval")


def _exponent_multiple(p: int, A: int, B: int, count: int, rng: random.Random) -> int:
    acc = 1
    for _ in range(count):
        P = sw_random_point(p, A, B, rng)
        k = _bsgs_annihilator(p, A, P)
        acc = math.lcm(acc, _point_order(p, A, P, k))
    return acc


def _candidates(acc: int, lo: int, hi: int) -> list[int]:
    first = ((lo + acc - 1) // acc) * acc
    return list(range(first, hi + 1, acc))


def _weil_filter(cands: list[int], acc: int, p: int) -> list[int]:
    """Weil-pairing tiebreak: for E(F_p) = Z/e x Z/m one has m | p - 1, so if
    acc is the true exponent the cofactor N/acc divides gcd(acc, p-1).  Only
    sound once acc has stabilized, hence applied last and never allowed to
    empty the candidate list."""
    g = math.gcd(acc, p - 1)
    filtered = [n for n in cands if g % (n // acc) == 0]
    return filtered if filtered else cands


def bsgs_order(E: WeierstrassCurve, p: int, samples: int, rng: random.Random | None = None) -> int:
    """|E(F_p)| from the orders of random points: the unique multiple of their
    lcm in the Hasse interval.  When the group exponent is too small to pin the
    order down (possible for small p), the quadratic twist supplies the missing
    constraint via |E| + |E^t| = 2p + 2.  Doubles the sample count once on
    residual ambiguity, then raises AmbiguityError."""
    if samples <= 0:
        raise UsageError("samples must be positive")
    if not arith.is_prime(p):
        raise UsageError(f"{p} is not prime")
    if not E.has_good_reduction(p):
        raise BadReductionError(f"bad reduction at {p}")
    if p <= 3:
        return naive_count(E, p)
    rng = rng if rng is not None else random.Random(0xEC0)
    A, B = short_model(E, p)
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    At, Bt = c * c * A % p, c * c * c * B % p
    lo, hi = hasse_interval(p)
    acc = acct = 1
    for count in (samples, 2 * samples):
        acc = math.lcm(acc, _exponent_multiple(p, A, B, count, rng))
        cands = _candidates(acc, lo, hi)
        if not cands:
            raise ArithmeticError("no multiple of the point-order lcm in the Hasse interval")
        if len(cands) == 1:
            return cands[0]
        acct = math.lcm(acct, _exponent_multiple(p, At, Bt, count, rng))
        twisted = set(_candidates(acct, lo, hi))
        cands = [n for n in cands if 2 * p + 2 - n in twisted]
        if len(cands) == 1:
            return cands[0]
        if not cands:
            raise ArithmeticError("twist constraint eliminated every candidate order")
        cands = _weil_filter(cands, acc, p)
        cands = [n for n in cands if 2 * p + 2 - n in set(_weil_filter(sorted(twisted), acct, p))]
        if len(cands) == 1:
            return cands[0]
    raise AmbiguityError(f"group order ambiguous at p={p} after retry")
