"""Integer kernel: modular inversion with divisor surfacing, Kronecker symbol,
primality, prime sieves, and Cornacchia-style norm representation in the nine
class-number-1 imaginary quadratic fields.

Python ints are the arbitrary-precision substrate throughout; residues are
plain ints paired with an explicit modulus argument.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError, RamifiedPrimeError, UsageError

# Squarefree d with Q(sqrt(-d)) of class number 1.
CLASS_NUMBER_ONE_DS = (1, 2, 3, 7, 11, 19, 43, 67, 163)

SIEVE_LIMIT = 1 << 31  # capacity guard for prime_sieve
_SEGMENT = 1 << 20


def inverse_or_divisor(a: int, n: int) -> tuple[int | None, int | None]:
    """Invert a mod n, or surface a nontrivial divisor of n.

    Returns (inv, None) with a*inv = 1 mod n when gcd(a, n) = 1, and
    (None, g) with g = gcd(a % n, n), 1 < g <= n, otherwise.  Total: never
    raises for n >= 2.  The divisor branch is the mechanism by which the
    curve layer turns a failed inversion into a factor.
    """
    if n < 2:
        raise UsageError(f"modulus must be >= 2, got {n}")
    a %= n
    g = math.gcd(a, n)
    if g == 1:
        return pow(a, -1, n), None
    return None, g


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 0."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    if D % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    while n % 2 == 0:
        n //= 2
        if D % 8 in (3, 5):
            k = -k
    # now n odd; reduce to a Jacobi symbol (D mod n / n)
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


# Deterministic Miller-Rabin witness set, valid for all n < 3.3 * 10^24
# (covers the whole 64-bit range).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_ROUNDS_ABOVE = 40


def _mr_round(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Primality test: deterministic below 2^64, 40 Miller-Rabin rounds above
    (witnesses drawn from an n-seeded generator so the answer is stable)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 3317044064679887385961981:
        witnesses = [a for a in _MR_WITNESSES if a < n - 1]
    else:
        rng = random.Random(n)
        witnesses = [rng.randrange(2, n - 1) for _ in range(_MR_ROUNDS_ABOVE)]
    return all(_mr_round(n, a, d, s) for a in witnesses)


def prime_sieve(limit: int) -> list[int]:
    """All primes <= limit, ascending (segmented odd-only Eratosthenes)."""
    if limit < 2:
        raise DomainError(f"prime_sieve needs limit >= 2, got {limit}")
    if limit > SIEVE_LIMIT:
        raise CapacityError(f"sieve limit {limit} exceeds budget {SIEVE_LIMIT}")
    root = math.isqrt(limit)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for i in range(2, math.isqrt(root) + 1):
        if base[i]:
            base[i * i :: i] = False
    small = np.nonzero(base)[0]
    if limit <= root:
        return [int(p) for p in small if p <= limit]
    primes = [int(p) for p in small]
    odd_small = [int(p) for p in small if p > 2]
    lo = root + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT - 1, limit)
        seg = np.ones(hi - lo + 1, dtype=bool)
        for p in odd_small:
            start = max(p * p, ((lo + p - 1) // p) * p)
            seg[start - lo :: p] = False
        if lo % 2 == 0:
            seg[0::2] = False
        else:
            seg[1::2] = False
        if lo <= 2 <= hi:
            seg[2 - lo] = True
        primes.extend(int(v) for v in np.nonzero(seg)[0] + lo)
        lo = hi + 1
    return primes


@lru_cache(maxsize=8)
def cached_primes(limit: int) -> tuple[int, ...]:
    """Shared immutable prime table (used by the L-function and census loops)."""
    return tuple(prime_sieve(limit))


def primes_below(y: int) -> list[int]:
    """Primes strictly below y (the strict-friability convention)."""
    if y <= 2:
        return []
    return [p for p in prime_sieve(y) if p < y]


def sqrt_mod(a: int, p: int) -> int | None:
    """Square root of a modulo an odd prime p (Tonelli-Shanks), or None."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class ImagQuadField:
    """One of the nine imaginary quadratic fields of class number 1.

    Elements of the ring of integers are written a + b*omega with
    omega = sqrt(-d) when the discriminant is even and (1 + sqrt(-d))/2
    when it is odd.
    """

    d: int

    def __post_init__(self):
        if self.d not in CLASS_NUMBER_ONE_DS:
            raise UsageError(f"d={self.d} is not in the class-number-1 whitelist")

    @property
    def disc(self) -> int:
        return -4 * self.d if self.d % 4 in (1, 2) else -self.d

    @property
    def unit_count(self) -> int:
        return 4 if self.d == 1 else 6 if self.d == 3 else 2

    def chi(self, n: int) -> int:
        """Kronecker character of the field evaluated at n."""
        return kronecker(self.disc, n)

    def norm(self, a: int, b: int) -> int:
        if self.disc % 4 == 0:
            return a * a + self.d * b * b
        return a * a + a * b + ((1 + self.d) // 4) * b * b

    def units(self) -> list["QuadInt"]:
        one = QuadInt(self, 1, 0)
        us = [one, -one]
        if self.d == 1:
            w = QuadInt(self, 0, 1)  # i
            us += [w, -w]
        elif self.d == 3:
            w = QuadInt(self, 0, 1)  # primitive 6th root of unity
            w2 = w * w
            us += [w, -w, w2, -w2]
        return us


@lru_cache(maxsize=None)
def field_for(d: int) -> ImagQuadField:
    return ImagQuadField(d)


@dataclass(frozen=True)
class QuadInt:
    """Element a + b*omega of the ring of integers of an ImagQuadField."""

    field: ImagQuadField
    a: int
    b: int

    @property
    def norm(self) -> int:
        return self.field.norm(self.a, self.b)

    @property
    def trace(self) -> int:
        # Tr(a + b*omega): omega has trace 0 (even disc) or 1 (odd disc)
        return 2 * self.a if self.field.disc % 4 == 0 else 2 * self.a + self.b

    def conjugate(self) -> "QuadInt":
        if self.field.disc % 4 == 0:
            return QuadInt(self.field, self.a, -self.b)
        return QuadInt(self.field, self.a + self.b, -self.b)

    def __neg__(self) -> "QuadInt":
        return QuadInt(self.field, -self.a, -self.b)

    def __sub__(self, other: "QuadInt") -> "QuadInt":
        return QuadInt(self.field, self.a - other.a, self.b - other.b)

    def __mul__(self, other: "QuadInt") -> "QuadInt":
        a, b, c, e = self.a, self.b, other.a, other.b
        if self.field.disc % 4 == 0:
            # omega^2 = -d
            return QuadInt(self.field, a * c - self.field.d * b * e, a * e + b * c)
        # omega^2 = omega - (1+d)/4
        m = (1 + self.field.d) // 4
        return QuadInt(self.field, a * c - m * b * e, a * e + b * c + b * e)


def cornacchia(p: int, K: ImagQuadField) -> QuadInt | None:
    """Element of norm p in O_K for a split prime p; None for an inert prime.

    Output is the canonical associate: smallest nonnegative b, ties broken by
    smallest a.  Raises RamifiedPrimeError when p divides disc(K).
    """
    D = K.disc
    if (-D) % p == 0:
        raise RamifiedPrimeError(f"p={p} ramifies in Q(sqrt(-{K.d}))")
    sym = kronecker(D, p)
    if sym == -1:
        return None
    if p <= 3:
        sol = _tiny_norm_search(p, K)
    else:
        sol = _cornacchia_4p(p, K)
    if sol is None:
        raise ArithmeticError(f"cornacchia failed for split p={p}, d={K.d}")
    return _canonical_associate(sol)


def _tiny_norm_search(p: int, K: ImagQuadField) -> QuadInt | None:
    bound = math.isqrt(4 * p // K.d) + 2
    for b in range(-bound, bound + 1):
        for a in range(-4 * p, 4 * p + 1):
            if K.norm(a, b) == p:
                return QuadInt(K, a, b)
    return None


def _cornacchia_4p(p: int, K: ImagQuadField) -> QuadInt | None:
    """Solve x^2 + |D| y^2 = 4p, then convert to the omega basis."""
    D = K.disc
    absD = -D
    t = sqrt_mod(D % p, p)
    if t is None:
        return None
    if (t - D) % 2 != 0:
        t = p - t
    # now t^2 = D (mod 4p); partial Euclid on (2p, t)
    a0, b0 = 2 * p, t % (2 * p)
    while b0 * b0 > 4 * p:
        a0, b0 = b0, a0 % b0
    x = b0
    rem = 4 * p - x * x
    if rem % absD != 0:
        return None
    y2 = rem // absD
    y = math.isqrt(y2)
    if y * y != y2:
        return None
    if D % 4 == 0:
        # x is even: p = (x/2)^2 + d y^2
        return QuadInt(K, x // 2, y)
    # pi = (x + y sqrt(-d))/2 = (x - y)/2 + y*omega
    return QuadInt(K, (x - y) // 2, y)


def _canonical_associate(z: QuadInt) -> QuadInt:
    cands = []
    for w in (z, z.conjugate()):
        for u in z.field.units():
            v = w * u
            if v.b >= 0:
                cands.append(v)
    cands.sort(key=lambda v: (v.b, v.a))
    return cands[0]
