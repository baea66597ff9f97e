"""
Boxscope Engine Quotients

Finite quotients Z/NZ x|_m Z/LZ of BS(1, m). With L = ord_m(N) this is the
congruence quotient G_m / G_m(N); any multiple L of ord_m(N) gives the
covering quotients used by the box-space construction.

Group law: (x1, k1)(x2, k2) = (x1 + m^k1 x2 mod N, k1 + k2 mod L).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from boxscope_engine.arith import OrderCertificate, mult_order
from boxscope_engine.group import BSElem
from boxscope_engine.validation import DomainError, require_coprime, require_positive


@dataclass(frozen=True)
class QuotientElem:
    """(x mod N, k mod L)."""
    x: int
    k: int

    def __str__(self) -> str:
        return f"{self.x},{self.k}"


@dataclass(frozen=True)
class QuotientGroup:
    """Z/NZ x|_m Z/LZ with ord_m(N) | L."""
    m: int
    N: int
    L: int
    m_inv: int
    order: int

    @property
    def size(self) -> int:
        return self.N * self.L

    @property
    def is_congruence_quotient(self) -> bool:
        return self.L == self.order

    @property
    def identity(self) -> QuotientElem:
        return QuotientElem(0, 0)

    def element(self, x: int, k: int) -> QuotientElem:
        """Reduce (x, k) into range."""
        return QuotientElem(x % self.N, k % self.L)

    def contains(self, u: QuotientElem) -> bool:
        return 0 <= u.x < self.N and 0 <= u.k < self.L

    def index(self, u: QuotientElem) -> int:
        """Dense vertex index x + N k."""
        return u.x + self.N * u.k

    def element_at(self, idx: int) -> QuotientElem:
        k, x = divmod(idx, self.N)
        return QuotientElem(x, k)

    def elements(self) -> Iterator[QuotientElem]:
        for idx in range(self.size):
            yield self.element_at(idx)

    def generators(self) -> dict[str, QuotientElem]:
        """Images of a, A, t, T in edge order."""
        return {
            "a": self.element(1, 0),
            "A": self.element(-1, 0),
            "t": self.element(0, 1),
            "T": self.element(0, -1),
        }

    def m_power(self, k: int) -> int:
        """m^k mod N for any integer k."""
        if k >= 0:
            return pow(self.m, k, self.N)
        return pow(self.m_inv, -k, self.N)

    def power(self, u: QuotientElem, n: int) -> QuotientElem:
        """u^n by square-and-multiply."""
        base = u if n >= 0 else q_inv(self, u)
        result = self.identity
        n = abs(n)
        while n:
            if n & 1:
                result = q_mul(self, result, base)
            base = q_mul(self, base, base)
            n >>= 1
        return result

    def __str__(self) -> str:
        return f"Z/{self.N} x|_{self.m} Z/{self.L}"


def _check_element(Q: QuotientGroup, u: QuotientElem) -> None:
    if not Q.contains(u):
        raise DomainError(
            f"0 <= x < {Q.N} and 0 <= k < {Q.L} required, got ({u.x}, {u.k})"
        )


def build_quotient(m: int, N: int, cert: Optional[OrderCertificate] = None) -> QuotientGroup:
    """G_m / G_m(N) = Z/NZ x|_m Z/ord_m(N)Z; N = 1 gives the trivial group."""
    require_positive("N", N)
    require_coprime(m, N)
    order = (cert or mult_order(m, N)).order
    return QuotientGroup(m=m, N=N, L=order, m_inv=pow(m, -1, N) if N > 1 else 0, order=order)


def build_covering_quotient(
    m: int, N: int, L: int, cert: Optional[OrderCertificate] = None
) -> QuotientGroup:
    """Z/NZ x|_m Z/LZ for a multiple L of ord_m(N)."""
    require_positive("N", N)
    require_positive("L", L)
    require_coprime(m, N)
    order = (cert or mult_order(m, N)).order
    if L % order:
        raise DomainError(f"ord_m(N) | L required, got ord_{m}({N}) = {order}, L = {L}")
    return QuotientGroup(m=m, N=N, L=L, m_inv=pow(m, -1, N) if N > 1 else 0, order=order)


def q_mul(Q: QuotientGroup, u: QuotientElem, v: QuotientElem) -> QuotientElem:
    """(x1, k1)(x2, k2) = (x1 + m^k1 x2, k1 + k2)."""
    _check_element(Q, u)
    _check_element(Q, v)
    return QuotientElem((u.x + Q.m_power(u.k) * v.x) % Q.N, (u.k + v.k) % Q.L)


def q_inv(Q: QuotientGroup, u: QuotientElem) -> QuotientElem:
    """(x, k)^-1 = (-m^-k x, -k)."""
    _check_element(Q, u)
    return QuotientElem(-Q.m_power(-u.k) * u.x % Q.N, -u.k % Q.L)


def reduce(g: BSElem, Q: QuotientGroup) -> QuotientElem:
    """Reduction mod N: x = num * m_inv^exp mod N, k = g.k mod L."""
    if g.m != Q.m:
        raise DomainError(f"element of BS(1, {g.m}) cannot reduce into a quotient of BS(1, {Q.m})")
    x = g.r.num * pow(Q.m_inv, g.r.exp, Q.N) % Q.N
    return QuotientElem(x, g.k % Q.L)


def is_congruence_member(g: BSElem, m: int, N: int) -> bool:
    """
    g in G_m(N): m^k = 1 (mod N) and r in N Z[1/m].

    Since gcd(m, N) = 1, r = num / m^exp lies in N Z[1/m] exactly when N | num.
    """
    require_positive("N", N)
    require_coprime(m, N)
    if g.m != m:
        raise DomainError(f"element of BS(1, {g.m}) tested against G_{m}({N})")
    if g.r.num % N:
        return False
    # m^k = 1 iff m^-k = 1.
    return pow(m, abs(g.k), N) == 1 % N


def project(u: QuotientElem, target: QuotientGroup) -> QuotientElem:
    """The covering map (x, k mod L) -> (x mod N', k mod L') onto a smaller quotient."""
    return QuotientElem(u.x % target.N, u.k % target.L)
