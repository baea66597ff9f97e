"""
Boxscope Engine Exact Arithmetic

Big-integer number theory behind every other module: primality, factorization,
gcd/lcm identities, multiplicative orders with certificates, and the
lifting factor eta_N(k) governing orders modulo prime powers.

Factorization strategy:
    trial division by the primes below 10^6, then Brent's variant of
    Pollard's rho on what is left, with Miller-Rabin deciding primality
    (deterministic below 2^64, 40 seeded random rounds above).
"""
from __future__ import annotations

import hashlib
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from math import gcd, isqrt, lcm
from typing import Iterable, Iterator, Optional

import numpy as np

from boxscope_engine.models import DEFAULT_ORACLE_CAP
from boxscope_engine.validation import (
    DomainError,
    InvariantViolation,
    ResourceCapError,
    UsageError,
    require_coprime,
    require_positive,
)

logger = logging.getLogger(__name__)

TRIAL_DIVISION_LIMIT = 10**6
MR_ROUNDS = 40
# Strong bases that decide primality for every n < 3.3 * 10^24 (covers 2^64).
_MR_BASES_64 = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


# ============================================================================
# PRIMES
# ============================================================================

@lru_cache(maxsize=4)
def small_primes(limit: int = TRIAL_DIVISION_LIMIT) -> tuple[int, ...]:
    """All primes below limit, by a numpy sieve of Eratosthenes."""
    if limit < 3:
        return ()
    sieve = np.ones(limit, dtype=bool)
    sieve[:2] = False
    for p in range(2, isqrt(limit - 1) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return tuple(int(p) for p in np.flatnonzero(sieve))


def _rng_for(n: int, seed: int = 0) -> random.Random:
    """Deterministic RNG per (seed, n)."""
    digest = hashlib.blake2b(f"{seed}:{n}".encode(), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _is_strong_witness(a: int, n: int, d: int, s: int) -> bool:
    """True when a proves n composite."""
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_probable_prime(n: int, rounds: int = MR_ROUNDS, seed: int = 0) -> bool:
    """
    Miller-Rabin primality test.

    Exact for n < 2^64 (fixed strong bases); above that, `rounds` random
    bases drawn from an RNG seeded by (seed, n), so answers are reproducible.
    """
    if n < 2:
        return False
    for p in _MR_BASES_64:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < (1 << 64):
        bases: Iterable[int] = _MR_BASES_64
    else:
        rng = _rng_for(n, seed)
        bases = (rng.randrange(2, n - 1) for _ in range(rounds))
    return not any(_is_strong_witness(a, n, d, s) for a in bases)


def pollard_brent(n: int, seed: int = 0) -> int:
    """
    Return a non-trivial factor of the odd composite n.

    Brent's cycle detection with batched gcds; restarts with a fresh
    polynomial x^2 + c whenever a run collapses to n.
    """
    if n % 2 == 0:
        return 2
    rng = _rng_for(n, seed)
    batch = 128
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(batch, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += batch
            r *= 2
        if g == n:
            # Batch overshot; walk it one step at a time.
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
        logger.debug("pollard_brent: restarting on %d", n)


# ============================================================================
# FACTORIZATION
# ============================================================================

@dataclass(frozen=True)
class Factorization:
    """Ordered prime factorization p_1^b_1 ... p_n^b_n (primes increasing)."""
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if any(b < 1 for _, b in self.factors):
            raise InvariantViolation(f"Non-positive exponent in {self.factors}")
        if any(a >= b for a, b in zip(primes, primes[1:])):
            raise InvariantViolation(f"Primes not strictly increasing in {self.factors}")

    @classmethod
    def from_dict(cls, exponents: dict[int, int]) -> Factorization:
        return cls(tuple(sorted((p, b) for p, b in exponents.items() if b > 0)))

    @property
    def value(self) -> int:
        result = 1
        for p, b in self.factors:
            result *= p**b
        return result

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __mul__(self, other: Factorization) -> Factorization:
        merged = self.as_dict()
        for p, b in other.factors:
            merged[p] = merged.get(p, 0) + b
        return Factorization.from_dict(merged)

    def verify(self) -> None:
        """Check every listed prime is prime (raises InvariantViolation)."""
        for p, _ in self.factors:
            if not is_probable_prime(p):
                raise InvariantViolation(f"Listed factor {p} is not prime")

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(str(p) if b == 1 else f"{p}^{b}" for p, b in self.factors)


def _split_into(n: int, exponents: dict[int, int], multiplicity: int = 1) -> None:
    """Add the prime factorization of n (no factors below 10^6) to exponents."""
    if n == 1:
        return
    if n < TRIAL_DIVISION_LIMIT**2 or is_probable_prime(n):
        exponents[n] = exponents.get(n, 0) + multiplicity
        return
    logger.debug("factorize: Pollard rho on %d-bit cofactor", n.bit_length())
    d = pollard_brent(n)
    # Divide out every copy of d.
    e = 0
    while n % d == 0:
        n //= d
        e += 1
    _split_into(d, exponents, multiplicity * e)
    _split_into(n, exponents, multiplicity)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Factor n >= 2 into primes."""
    if n < 2:
        raise DomainError(f"n >= 2 required, got n = {n}")
    exponents: dict[int, int] = {}
    rest = n
    for p in small_primes():
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            exponents[p] = e
    if rest > 1:
        _split_into(rest, exponents)
    result = Factorization.from_dict(exponents)
    if result.value != n:
        raise InvariantViolation(f"factorize({n}) produced {result}")
    return result


def factorize_or_one(n: int) -> Factorization:
    """Like factorize, but 1 maps to the empty factorization."""
    require_positive("n", n)
    return Factorization() if n == 1 else factorize(n)


# ============================================================================
# GCD / LCM
# ============================================================================

def lcm_product_formula(values: list[int]) -> int:
    """
    lcm(a_1, ..., a_n) = (a_1 ... a_n) / gcd(P_1, ..., P_n)

    where P_i is the product of all values except a_i.
    """
    n = len(values)
    prefix = [1] * (n + 1)
    suffix = [1] * (n + 1)
    for i, a in enumerate(values):
        prefix[i + 1] = prefix[i] * a
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] * values[i]
    g = 0
    for i in range(n):
        g = gcd(g, prefix[i] * suffix[i + 1])
    return prefix[n] // g


def lcm_fold(values: list[int]) -> int:
    """lcm by pairwise folding: lcm(lcm(a_1, ..., a_{n-1}), a_n)."""
    return reduce(lcm, values, 1)


def lcm_many(values: list[int]) -> int:
    """
    Least common multiple of a nonempty list of positive integers.

    Computed by the product/gcd identity and by folding; both must agree.
    """
    if not values:
        raise UsageError("lcm_many requires a nonempty list of values")
    for i, a in enumerate(values):
        require_positive(f"values[{i}]", a)
    by_formula = lcm_product_formula(values)
    by_fold = lcm_fold(values)
    if by_formula != by_fold:
        raise InvariantViolation(
            f"lcm mismatch for {values}: product formula {by_formula}, folding {by_fold}"
        )
    return by_fold


# ============================================================================
# MULTIPLICATIVE ORDER
# ============================================================================

@dataclass(frozen=True)
class OrderCertificate:
    """
    ord_m(N) together with the data that certifies it.

    m^order = mu * N + 1. Only mu mod N is kept eagerly (from m^order mod N^2);
    the full mu is m^order-sized and computed on demand.
    """
    m: int
    N: int
    order: int
    order_factorization: Factorization = field(default_factory=Factorization)

    @property
    def mu_mod_n(self) -> int:
        if self.N == 1:
            return 0
        return (pow(self.m, self.order, self.N * self.N) - 1) // self.N % self.N

    @property
    def mu(self) -> int:
        return (self.m**self.order - 1) // self.N

    def verify(self) -> None:
        """Re-check m^order = 1 and m^(order/q) != 1 for each prime q | order."""
        if gcd(self.m, self.N) != 1:
            raise InvariantViolation(f"gcd({self.m}, {self.N}) != 1 in certificate")
        if self.order_factorization.value != self.order:
            raise InvariantViolation(f"order factorization does not multiply to {self.order}")
        if pow(self.m, self.order, self.N) != 1 % self.N:
            raise InvariantViolation(f"{self.m}^{self.order} != 1 mod {self.N}")
        for q in self.order_factorization.primes:
            if self.N > 1 and pow(self.m, self.order // q, self.N) == 1:
                raise InvariantViolation(
                    f"{self.m}^({self.order}/{q}) = 1 mod {self.N}; order is not minimal"
                )


def mult_order_bruteforce(m: int, N: int, cap: int = DEFAULT_ORACLE_CAP) -> int:
    """Smallest e >= 1 with m^e = 1 (mod N), by successive multiplication."""
    require_positive("N", N)
    require_coprime(m, N)
    if N == 1:
        return 1
    base = m % N
    x = base
    e = 1
    while x != 1:
        if e >= cap:
            raise ResourceCapError(
                f"brute-force order of {m} mod {N} exceeds the iteration cap {cap}",
                required=e + 1,
                cap=cap,
            )
        x = x * base % N
        e += 1
    return e


def order_from_multiple(m: int, N: int, multiple: Factorization) -> OrderCertificate:
    """
    Reduce a known exponent E (m^E = 1 mod N) to ord_m(N).

    For each prime q | E, divide q out while the power stays 1. N itself is
    never factored.
    """
    require_positive("N", N)
    require_coprime(m, N)
    e = multiple.value
    if N > 1 and pow(m, e, N) != 1:
        raise DomainError(f"{m}^{e} = 1 (mod {N}) required for a multiple of the order")
    exponents = multiple.as_dict()
    for q, b in multiple:
        for _ in range(b):
            if N > 1 and pow(m, e // q, N) != 1:
                break
            e //= q
            exponents[q] -= 1
    return OrderCertificate(m=m, N=N, order=e, order_factorization=Factorization.from_dict(exponents))


def _order_mod_prime(m: int, p: int) -> OrderCertificate:
    """ord_m(p) by divisor reduction over p - 1."""
    if p == 2:
        return OrderCertificate(m=m, N=2, order=1)
    return order_from_multiple(m, p, factorize(p - 1))


def _mu_mod(m: int, N: int, order: int) -> int:
    return (pow(m, order, N * N) - 1) // N % N


def _eta_factorization(p: int, beta: int, mu_mod_p: int) -> Factorization:
    """eta_p(beta) = p^(beta-1) / gcd(mu, p), as a factorization."""
    if beta == 1:
        return Factorization()
    e = beta - 1 - (1 if mu_mod_p % p == 0 else 0)
    return Factorization(((p, e),)) if e > 0 else Factorization()


def mult_order(m: int, N: int, factorization: Optional[Factorization] = None) -> OrderCertificate:
    """
    ord_m(N) from the prime decomposition of N.

    Each ord_m(p^b) is reduced from ord_m(p) * eta_p(b), which is always a
    multiple of it, and the prime-power orders are combined with lcm_many.
    """
    require_positive("N", N)
    require_coprime(m, N)
    if N == 1:
        return OrderCertificate(m=m, N=1, order=1)
    fac = factorization if factorization is not None else factorize(N)
    if fac.value != N:
        raise DomainError(f"factorization {fac} does not multiply to N = {N}")

    local_orders: list[int] = []
    order_exponents: dict[int, int] = {}
    for p, beta in fac:
        base = _order_mod_prime(m, p)
        if beta == 1:
            local = base
        else:
            multiple = base.order_factorization * _eta_factorization(
                p, beta, _mu_mod(m, p, base.order)
            )
            local = order_from_multiple(m, p**beta, multiple)
        local_orders.append(local.order)
        for q, b in local.order_factorization:
            order_exponents[q] = max(order_exponents.get(q, 0), b)

    order = lcm_many(local_orders)
    cert = OrderCertificate(
        m=m, N=N, order=order, order_factorization=Factorization.from_dict(order_exponents)
    )
    if cert.order_factorization.value != order:
        raise InvariantViolation(f"order factorization mismatch for ord_{m}({N})")
    return cert


def eta(m: int, N: int, k: int) -> int:
    """eta_N(k) = N^(k-1) / gcd(mu, N) for k >= 2, and 1 for k = 1."""
    require_positive("k", k)
    require_positive("N", N)
    require_coprime(m, N)
    if k == 1:
        return 1
    cert = mult_order(m, N)
    return N ** (k - 1) // gcd(cert.mu_mod_n, N)


@dataclass(frozen=True)
class LiftReport:
    """Direct ord_m(N^k) against the lifting prediction ord_m(N) * eta_N(k)."""
    m: int
    N: int
    k: int
    actual: int
    predicted: int

    @property
    def exact(self) -> bool:
        return self.actual == self.predicted

    @property
    def divides(self) -> bool:
        return self.predicted % self.actual == 0


def lift_order(m: int, N: int, k: int) -> LiftReport:
    """Compare ord_m(N^k) with ord_m(N) * eta_N(k)."""
    require_positive("k", k)
    base = mult_order(m, N)
    fac_power = Factorization.from_dict({p: b * k for p, b in factorize_or_one(N)})
    actual = mult_order(m, N**k, fac_power).order
    return LiftReport(m=m, N=N, k=k, actual=actual, predicted=base.order * eta(m, N, k))


def coprime_moduli(m: int, limit: int, start: int = 1) -> Iterator[int]:
    """Yield N in [start, limit] with gcd(m, N) = 1."""
    for n in range(start, limit + 1):
        if gcd(m, n) == 1:
            yield n
