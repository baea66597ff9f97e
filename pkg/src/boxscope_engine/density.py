"""
Boxscope Engine Prime Densities

Partial (finite-range) versions of the natural and analytic primitive
densities of a prime set, partial Euler products, and exact scans of
ord_m(N)/N over P-smooth moduli.

Every quantity here is a truncation: it says something about the scanned
range only, never about the limit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from typing import Callable, Iterator, Optional

import mpmath
import sympy

from boxscope_engine.arith import Factorization, mult_order
from boxscope_engine.models import RatioRow
from boxscope_engine.sweep import ordered_map
from boxscope_engine.validation import DomainError, require_at_least, require_base, require_positive

logger = logging.getLogger(__name__)


# ============================================================================
# PRIME SETS
# ============================================================================

@dataclass(frozen=True)
class PrimeSet:
    """A finite list of primes, or the primes satisfying a predicate."""
    name: str
    members: Optional[tuple[int, ...]] = None
    predicate: Optional[Callable[[int], bool]] = field(default=None, compare=False)

    @classmethod
    def explicit(cls, primes: list[int], name: Optional[str] = None) -> PrimeSet:
        for p in primes:
            if not sympy.isprime(p):
                raise DomainError(f"every member of P must be prime, got {p}")
        members = tuple(sorted(set(primes)))
        return cls(name=name or "{" + ", ".join(map(str, members)) + "}", members=members)

    @classmethod
    def all_primes(cls) -> PrimeSet:
        return cls(name="all primes", predicate=lambda p: True)

    @classmethod
    def residue_class(cls, r: int, q: int) -> PrimeSet:
        """Primes p with p = r (mod q)."""
        require_positive("q", q)
        r %= q
        return cls(name=f"primes = {r} mod {q}", predicate=lambda p: p % q == r)

    @classmethod
    def empty(cls) -> PrimeSet:
        return cls(name="empty set", members=())

    def __contains__(self, p: int) -> bool:
        if self.members is not None:
            return p in self.members
        return sympy.isprime(p) and self.predicate(p)

    def primes_up_to(self, x: int) -> list[int]:
        if self.members is not None:
            return [p for p in self.members if p <= x]
        return [p for p in sympy.primerange(2, x + 1) if self.predicate(p)]

    def iter_members(self) -> Iterator[int]:
        """Members in increasing order (infinite for predicate sets)."""
        if self.members is not None:
            yield from self.members
            return
        p = 2
        while True:
            if self.predicate(p):
                yield p
            p = sympy.nextprime(p)

    def first(self, count: int) -> list[int]:
        return list(islice(self.iter_members(), count))

    def __str__(self) -> str:
        return self.name


# ============================================================================
# DENSITIES
# ============================================================================

def natural_density_partial(P: PrimeSet, x: int) -> Fraction:
    """|{p <= x : p in P}| / pi(x), exactly."""
    require_at_least("x", x, 2)
    return Fraction(len(P.primes_up_to(x)), int(sympy.primepi(x)))


def analytic_density_partial(P: PrimeSet, s: float, cutoff: int, precision_bits: int = 96) -> float:
    """
    (sum_{p in P, p <= cutoff} p^-s) / (sum_{p <= cutoff} p^-s).

    A truncation of the analytic primitive density at a fixed s and cutoff;
    the limit itself is not computed.
    """
    if s <= 1:
        raise DomainError(f"s > 1 required, got s = {s}")
    require_at_least("cutoff", cutoff, 2)
    chosen = set(P.primes_up_to(cutoff))
    with mpmath.workprec(precision_bits):
        s_mp = mpmath.mpf(s)
        total = mpmath.mpf(0)
        part = mpmath.mpf(0)
        for p in sympy.primerange(2, cutoff + 1):
            term = mpmath.power(p, -s_mp)
            total += term
            if p in chosen:
                part += term
        return float(part / total)


@dataclass(frozen=True)
class EulerProduct:
    """prod (1 - 1/p) over the first `used` members of P."""
    value: Fraction
    requested: int
    used: int

    @property
    def truncated(self) -> bool:
        """True when P had fewer members than requested."""
        return self.used < self.requested


def euler_product_partial(P: PrimeSet, count: int) -> EulerProduct:
    """Product of (1 - 1/p) over the first `count` members of P."""
    require_positive("count", count)
    primes = P.first(count)
    value = Fraction(1)
    for p in primes:
        value *= Fraction(p - 1, p)
    if len(primes) < count:
        logger.warning("euler_product_partial: %s has only %d of %d members", P, len(primes), count)
    return EulerProduct(value=value, requested=count, used=len(primes))


def euler_product_sequence(P: PrimeSet, count: int) -> list[Fraction]:
    """The partial products for 1, 2, ..., count members."""
    require_positive("count", count)
    values = []
    value = Fraction(1)
    for p in P.first(count):
        value *= Fraction(p - 1, p)
        values.append(value)
    return values


def totient_ratio_bound(fac: Factorization) -> Fraction:
    """phi(N)/N = prod (1 - 1/p_i), the envelope for ord_m(N)/N."""
    value = Fraction(1)
    for p, _ in fac:
        value *= Fraction(p - 1, p)
    return value


# ============================================================================
# RATIO SCANS
# ============================================================================

def smooth_numbers(primes: list[int], bound: int) -> list[tuple[int, Factorization]]:
    """All N <= bound whose prime factors lie in primes, with factorizations, sorted."""
    found: list[tuple[int, dict[int, int]]] = [(1, {})]
    for p in sorted(set(primes)):
        extended = []
        for n, exps in found:
            value, e = n * p, 1
            while value <= bound:
                extended.append((value, {**exps, p: e}))
                value *= p
                e += 1
        found.extend(extended)
    return sorted(((n, Factorization.from_dict(exps)) for n, exps in found), key=lambda item: item[0])


@dataclass(frozen=True)
class RatioScan:
    """Exact minimum of ord_m(N)/N over the scanned P-smooth range."""
    m: int
    primes: tuple[int, ...]
    bound: int
    min_ratio: Fraction
    argmin_N: int
    rows: list[RatioRow]


def _ratio_task(task: tuple[int, int, Factorization]) -> RatioRow:
    m, N, fac = task
    order = mult_order(m, N, fac).order
    ratio = Fraction(order, N)
    return RatioRow(N=N, ord=order, ratio=ratio, ratio_decimal=float(ratio))


def ratio_scan(m: int, primes: list[int], bound: int, jobs: int = 1) -> RatioScan:
    """
    ord_m(N)/N for every P-smooth N <= bound (N = 1 included).

    The minimum is a certified lower bound for this range only; ties go to
    the smallest N.
    """
    require_base(m)
    require_positive("bound", bound)
    for p in primes:
        if not sympy.isprime(p):
            raise DomainError(f"every member of P must be prime, got {p}")
        if m % p == 0:
            raise DomainError(f"p does not divide m required for every p in P, got {p} | {m}")
    tasks = [(m, N, fac) for N, fac in smooth_numbers(primes, bound)]
    rows = ordered_map(_ratio_task, tasks, jobs=jobs, chunksize=64)
    best = min(rows, key=lambda row: (row.ratio, row.N))
    return RatioScan(
        m=m,
        primes=tuple(sorted(set(primes))),
        bound=bound,
        min_ratio=best.ratio,
        argmin_N=best.N,
        rows=rows,
    )
