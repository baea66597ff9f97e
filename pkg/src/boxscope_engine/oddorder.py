"""
Boxscope Engine Odd-Order Moduli

Search for moduli N coprime to m in which a positive unit s = a1/a2 of
Z[1/m] has odd multiplicative order. For odd k, the part N_k of a1^k - a2^k
coprime to m satisfies s^k = 1 (mod N_k), so the order of s divides k and is
odd; each candidate is still checked directly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from math import gcd
from typing import Optional

from boxscope_engine.arith import factorize, factorize_or_one, order_from_multiple
from boxscope_engine.models import DEFAULT_ODDORDER_K_MAX
from boxscope_engine.validation import (
    DomainError,
    InvariantViolation,
    SearchExhaustedError,
    require_at_least,
    require_base,
    require_positive,
)

logger = logging.getLogger(__name__)


def strip_m_part(n: int, m: int) -> tuple[int, int]:
    """Split n = N q with gcd(N, m) = 1 and every prime of q dividing m."""
    require_positive("n", n)
    require_base(m)
    N, q = n, 1
    g = gcd(N, m)
    while g > 1:
        N //= g
        q *= g
        g = gcd(N, m)
    return N, q


@dataclass(frozen=True)
class UnitSpec:
    """s = a1/a2 with a1 >= a2 > 0 coprime, all their primes dividing m."""
    a1: int
    a2: int
    m: int

    @property
    def is_one(self) -> bool:
        return self.a1 == self.a2

    @classmethod
    def parse(cls, a1: int, a2: int, m: int) -> UnitSpec:
        """
        Normalize a1/a2: reduce, and invert when s < 1.

        Negative units are rejected: replacing s by s^-1 (or -s) reduces the
        search to a positive s > 1.
        """
        require_base(m)
        if a1 <= 0 or a2 <= 0:
            raise DomainError(
                f"a1 > 0 and a2 > 0 required (negative units reduce to positive ones), got s = {a1}/{a2}"
            )
        g = gcd(a1, a2)
        a1, a2 = a1 // g, a2 // g
        for name, value in (("a1", a1), ("a2", a2)):
            rest, _ = strip_m_part(value, m)
            if rest != 1:
                raise DomainError(
                    f"every prime factor of {name} must divide m, got {name} = {value} with factor {rest} coprime to {m}"
                )
        if a1 < a2:
            a1, a2 = a2, a1
        return cls(a1=a1, a2=a2, m=m)

    def residue(self, N: int) -> int:
        """s mod N."""
        return self.a1 * pow(self.a2, -1, N) % N if N > 1 else 0

    def __str__(self) -> str:
        return str(self.a1) if self.a2 == 1 else f"{self.a1}/{self.a2}"


@dataclass(frozen=True)
class OddOrderModulus:
    """N with s of odd order in (Z/NZ)^*, found at exponent k (None when s = 1)."""
    k: Optional[int]
    N: int
    order: int


def odd_order_moduli(
    s: UnitSpec, count: int, k_max: int = DEFAULT_ODDORDER_K_MAX
) -> list[OddOrderModulus]:
    """
    The first `count` distinct moduli N_k = strip_m_part(a1^k - a2^k) over
    odd k = 1, 3, 5, ..., skipping N_k = 1 and repeats.

    For s = 1 any modulus coprime to m works; the smallest ones are returned.
    Raises SearchExhaustedError (carrying the partial list) when k passes k_max.
    """
    require_positive("count", count)
    m = s.m
    found: list[OddOrderModulus] = []
    if s.is_one:
        N = 2
        while len(found) < count:
            if gcd(N, m) == 1:
                found.append(OddOrderModulus(k=None, N=N, order=1))
            N += 1
        return found

    seen: set[int] = set()
    for k in range(1, k_max + 1, 2):
        N, _ = strip_m_part(s.a1**k - s.a2**k, m)
        if N == 1 or N in seen:
            continue
        seen.add(N)
        order = order_from_multiple(s.residue(N), N, factorize_or_one(k)).order
        if order % 2 == 0 or k % order:
            raise InvariantViolation(f"order {order} of {s} mod {N} is not an odd divisor of k = {k}")
        found.append(OddOrderModulus(k=k, N=N, order=order))
        logger.debug("odd_order_moduli: k = %d gives N = %d (order %d)", k, N, order)
        if len(found) == count:
            return found
    raise SearchExhaustedError(
        f"found {len(found)} of {count} odd-order moduli for s = {s} with k <= {k_max}; raise the k cap",
        required=count,
        cap=k_max,
        partial=found,
    )


def dominant_prime(N: int) -> tuple[int, int]:
    """The (p, b) with the largest prime power p^b in N; larger p wins ties."""
    require_at_least("N", N, 2)
    fac = factorize(N)
    return max(fac, key=lambda pb: (pb[0] ** pb[1], pb[0]))
