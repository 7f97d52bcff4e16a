"""Analytic constants ranking ECM-friendliness of CM curves: L(1, chi), the
logarithmic derivative gamma_K = L'(1,chi)/L(1,chi) as a prime sum, the
companion sum Sigma_K, the constant alpha = gamma_K - Sigma_K, theoretical
per-prime expected valuations, the empirical estimate alpha-tilde from
averaged valuations of |E(F_p)|, and the generic-curve divisibility weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from . import arith
from .arith import ImagQuadField
from .ecm import CatalogCurve
from .errors import DomainError, UsageError

# Euler-Mascheroni constant to 20 digits
EULER_GAMMA = 0.57721566490153286061

DEFAULT_ELL_BOUND = 10**6
EMPIRICAL_ELL_BOUND = 10**4
EMPIRICAL_P_BOUND = 10**3
_ELL_GUARD = 10**5


class TruncationWarning(UserWarning):
    pass


def l_one(K: ImagQuadField) -> float:
    """L(1, chi) by the class number formula, exact for class number 1:
    2 pi h / (w sqrt(|D|)) with h = 1 and w the number of units."""
    return 2.0 * math.pi / (K.unit_count * math.sqrt(-K.disc))


def l_one_series(K: ImagQuadField, terms: int = 10**6) -> float:
    """Slow cross-check: truncated character sum sum_{n<=terms} chi(n)/n."""
    return math.fsum(K.chi(n) / n for n in range(1, terms + 1))


def _check_ell_bound(ell_bound: int) -> None:
    if ell_bound < _ELL_GUARD:
        warnings.warn(
            f"ell_bound={ell_bound} below the accuracy guard {_ELL_GUARD}; "
            "the truncated series may be off in the second decimal",
            TruncationWarning,
            stacklevel=3,
        )


def gamma_k(K: ImagQuadField, ell_bound: int = DEFAULT_ELL_BOUND) -> float:
    """Truncated prime sum for L'(1,chi)/L(1,chi):
    -sum_l log l (chi(l)/(l-1) + |chi(l)|(1-chi(l))/(l^2-1))."""
    _check_ell_bound(ell_bound)
    terms = []
    for ell in arith.cached_primes(ell_bound):
        c = K.chi(ell)
        t = c / (ell - 1)
        if c:
            t += abs(c) * (1 - c) / (ell * ell - 1)
        if t:
            terms.append(math.log(ell) * t)
    return -math.fsum(terms)


def sigma_k(
    K: ImagQuadField,
    ell_bound: int = DEFAULT_ELL_BOUND,
    all_primes: bool = False,
) -> float:
    """Truncated field sum Sigma_K: inert and ramified parts plus the
    (3+chi)/(l-1)^2 series.

    The default convention takes the (3+chi)/(l-1)^2 series over split primes
    only, which is what the frozen reference column values were produced with.
    all_primes=True extends that series to every prime; this is the variant
    for which the exact rearrangement identity
    sum_l (3/(l-1) - 4 E[val_l]) log l = gamma_K - Sigma_K holds term by term.
    """
    _check_ell_bound(ell_bound)
    terms = []
    for ell in arith.cached_primes(ell_bound):
        c = K.chi(ell)
        lg = math.log(ell)
        t = (3 + c) / ((ell - 1) * (ell - 1)) if (all_primes or c == 1) else 0.0
        if c == -1:
            l2 = ell * ell - 1
            t += (2.0 / l2) * (-1.0 + 2.0 * ell * ell / l2)
        elif c == 0:
            t += ell / ((ell - 1) * (ell - 1))
        terms.append(lg * t)
    return math.fsum(terms)


def alpha_cm(K: ImagQuadField, ell_bound: int = DEFAULT_ELL_BOUND) -> float:
    """alpha(E) = gamma_K - Sigma_K at a common truncation."""
    return gamma_k(K, ell_bound) - sigma_k(K, ell_bound)


def expected_valuation_cm(K: ImagQuadField, ell: int) -> float:
    """Theoretical average of val_l(|E(F_p)|) over primes p, for a curve with
    CM by O_K."""
    if not arith.is_prime(ell):
        raise UsageError(f"{ell} is not prime")
    c = K.chi(ell)
    val4 = (3 + c) / (ell - 1) * (1.0 + 1.0 / (ell - 1))
    if c == 0:
        val4 += ell / ((ell - 1) * (ell - 1))
    if c == -1:
        l2 = ell * ell - 1
        val4 += 4.0 * ell * ell / (l2 * l2)
    return val4 / 4.0


def _val(n: int, ell: int) -> int:
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def alpha_empirical(
    E: CatalogCurve,
    ell_bound: int = EMPIRICAL_ELL_BOUND,
    p_bound: int = EMPIRICAL_P_BOUND,
    order_fn=None,
) -> float:
    """alpha-tilde: replace the expectation in the per-prime terms by the
    average valuation of |E(F_p)| over good primes p <= p_bound.  CM curves
    use (4 avg - 3/(l-1)) log l terms, non-CM (avg - 1/(l-1)) log l; the sign
    convention matches the frozen reference column (more negative = larger
    observed valuations = more ECM-friendly)."""
    if ell_bound < 2:
        raise DomainError("ell_bound must be at least 2")
    if order_fn is None:
        from . import cmcount

        order_fn = cmcount.order_fn_for(E)
    orders = [
        order_fn(p)
        for p in arith.cached_primes(p_bound)
        if E.curve.has_good_reduction(p)
    ]
    if not orders:
        raise DomainError(f"no good primes up to {p_bound}")
    cm = E.cm_field is not None
    terms = []
    for ell in arith.cached_primes(ell_bound):
        avg = math.fsum(_val(n, ell) for n in orders) / len(orders)
        if cm:
            t = 4.0 * avg - 3.0 / (ell - 1)
        else:
            t = avg - 1.0 / (ell - 1)
        terms.append(t * math.log(ell))
    return math.fsum(terms)


def w_noncm(d: int, m_guard: int = 1) -> float:
    """Divisibility weight prod_{l | d} l(l^2-2)/((l-1)(l^2-1)) for squarefree
    d coprime to the caller-supplied Serre guard."""
    if d < 1:
        raise DomainError("d must be positive")
    if m_guard > 1 and math.gcd(d, m_guard) != 1:
        raise UsageError(f"d={d} shares a factor with the guard {m_guard}")
    w = 1.0
    n = d
    ell = 2
    while ell * ell <= n:
        if n % ell == 0:
            n //= ell
            if n % ell == 0:
                raise DomainError(f"d={d} is not squarefree")
            w *= ell * (ell * ell - 2) / ((ell - 1) * (ell * ell - 1))
        ell += 1 if ell == 2 else 2
    if n > 1:
        ell = n
        w *= ell * (ell * ell - 2) / ((ell - 1) * (ell * ell - 1))
    return w


@dataclass(frozen=True)
class AlphaReport:
    """One column of the constants table for a CM field, with metadata."""

    field_d: int
    gamma_k: float
    sigma_k: float
    alpha: float
    alpha_tilde: float | None
    curve_name: str | None
    ell_bound: int
    p_bound: int
    per_ell: list[tuple[int, float, float]] = field(default_factory=list)

    @property
    def difference(self) -> float | None:
        if self.alpha_tilde is None:
            return None
        return self.alpha_tilde - self.alpha


def alpha_report(
    E: CatalogCurve,
    ell_bound: int = DEFAULT_ELL_BOUND,
    empirical_ell_bound: int = EMPIRICAL_ELL_BOUND,
    p_bound: int = EMPIRICAL_P_BOUND,
    with_empirical: bool = True,
    per_ell_limit: int = 0,
) -> AlphaReport:
    K = E.cm_field
    if K is None:
        raise UsageError(f"{E.name} is not a CM curve")
    g = gamma_k(K, ell_bound)
    s = sigma_k(K, ell_bound)
    at = alpha_empirical(E, empirical_ell_bound, p_bound) if with_empirical else None
    per_ell = []
    if per_ell_limit:
        from . import cmcount

        order_fn = cmcount.order_fn_for(E)
        orders = [
            order_fn(p)
            for p in arith.cached_primes(p_bound)
            if E.curve.has_good_reduction(p)
        ]
        for ell in arith.cached_primes(per_ell_limit):
            emp = math.fsum(_val(n, ell) for n in orders) / len(orders)
            per_ell.append((ell, expected_valuation_cm(K, ell), emp))
    return AlphaReport(
        field_d=K.d,
        gamma_k=g,
        sigma_k=s,
        alpha=g - s,
        alpha_tilde=at,
        curve_name=E.name,
        ell_bound=ell_bound,
        p_bound=p_bound,
        per_ell=per_ell,
    )
