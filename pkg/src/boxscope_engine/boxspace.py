"""
Boxscope Engine Box Spaces

Nested modulus sequences N_1 | N_2 | ..., finite-prefix D_alpha tables for
the arithmetic box spaces they define, and the covering quotients of order
n = ord_m(N) N^D used to build box spaces with a prescribed D_alpha.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

import mpmath

from boxscope_engine.arith import (
    Factorization,
    OrderCertificate,
    factorize_or_one,
    mult_order,
    order_from_multiple,
)
from boxscope_engine.cayley import build_graph, diameter
from boxscope_engine.density import PrimeSet
from boxscope_engine.models import (
    DEFAULT_MAX_VERTICES,
    DalphaReport,
    DalphaRow,
    SequenceKind,
)
from boxscope_engine.quotient import (
    build_covering_quotient,
    build_quotient,
    project,
    q_mul,
)
from boxscope_engine.sweep import ordered_map
from boxscope_engine.validation import (
    ChainValidationError,
    DomainError,
    InvariantViolation,
    require_base,
    require_coprime,
    require_open_unit_interval,
    require_positive,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_PAIR_LIMIT = 10**6


# ============================================================================
# SEQUENCES
# ============================================================================

@dataclass(frozen=True)
class ModulusSequence:
    """N_1 | N_2 | ... with gcd(m, N_k) = 1; family terms are generated lazily."""
    m: int
    kind: SequenceKind
    explicit_terms: tuple[int, ...] = ()

    @property
    def length(self) -> Optional[int]:
        """Number of terms, or None for an infinite family."""
        return len(self.explicit_terms) if self.kind == SequenceKind.EXPLICIT else None

    def term(self, k: int) -> int:
        """N_k, 1-indexed."""
        require_positive("k", k)
        if self.kind == SequenceKind.GEOMETRIC:
            return (self.m * self.m - 1) ** k
        if self.kind == SequenceKind.DOUBLY_EXPONENTIAL:
            return self.m ** (2**k) - 1
        if k > len(self.explicit_terms):
            raise DomainError(f"k <= {len(self.explicit_terms)} required for this explicit sequence, got k = {k}")
        return self.explicit_terms[k - 1]

    def __iter__(self) -> Iterator[int]:
        k = 1
        previous = None
        while self.length is None or k <= self.length:
            current = self.term(k)
            if previous is not None and current % previous:
                raise InvariantViolation(f"N_{k - 1} = {previous} does not divide N_{k} = {current}")
            if gcd(self.m, current) != 1:
                raise InvariantViolation(f"gcd(m, N_{k}) != 1 for N_{k} = {current}")
            yield current
            previous = current
            k += 1

    def terms(self, k_max: int) -> list[int]:
        """N_1 .. N_{k_max} (fewer for a shorter explicit list)."""
        return list(islice(self, k_max))

    def term_factorization(self, k: int) -> Factorization:
        if self.kind == SequenceKind.GEOMETRIC:
            base = factorize_or_one(self.m * self.m - 1)
            return Factorization.from_dict({p: b * k for p, b in base})
        return factorize_or_one(self.term(k))

    def order_certificate(self, k: int) -> OrderCertificate:
        """
        ord_m(N_k) using each family's structure.

        Geometric terms are factored through m^2 - 1; doubly exponential terms
        reduce from the known multiple 2^k without factoring N_k.
        """
        N = self.term(k)
        if self.kind == SequenceKind.DOUBLY_EXPONENTIAL:
            return order_from_multiple(self.m, N, Factorization(((2, k),)))
        return mult_order(self.m, N, self.term_factorization(k))

    def __str__(self) -> str:
        if self.kind == SequenceKind.GEOMETRIC:
            return f"({self.m}^2 - 1)^k"
        if self.kind == SequenceKind.DOUBLY_EXPONENTIAL:
            return f"{self.m}^(2^k) - 1"
        return "[" + ", ".join(map(str, self.explicit_terms)) + "]"


def make_sequence(m: int, kind: SequenceKind, terms: Optional[Sequence[int]] = None) -> ModulusSequence:
    """
    Build a modulus sequence.

    Explicit lists are checked term by term; a ChainValidationError carries
    the 1-based index k of the first offending N_k.
    """
    require_base(m)
    kind = SequenceKind(kind)
    if kind != SequenceKind.EXPLICIT:
        if terms:
            raise DomainError(f"explicit terms are only accepted for kind 'explicit', got kind '{kind.value}'")
        return ModulusSequence(m=m, kind=kind)

    if not terms:
        raise DomainError("an explicit sequence needs at least one term")
    values = [int(n) for n in terms]
    for k, n in enumerate(values, start=1):
        if n < 1:
            raise ChainValidationError(f"N_{k} >= 1 required, got N_{k} = {n}", index=k)
        g = gcd(m, n)
        if g != 1:
            raise ChainValidationError(
                f"gcd(m, N_{k}) = 1 required, got gcd({m}, {n}) = {g}", index=k
            )
        if k > 1 and n % values[k - 2]:
            raise ChainValidationError(
                f"N_{k - 1} | N_{k} required, got {values[k - 2]} does not divide {n}", index=k
            )
    return ModulusSequence(m=m, kind=kind, explicit_terms=tuple(values))


def prime_support(seq: ModulusSequence, k_max: int) -> PrimeSet:
    """P = union of the prime factors of N_1 .. N_{k_max}."""
    primes: set[int] = set()
    for k in range(1, k_max + 1):
        if seq.length is not None and k > seq.length:
            break
        primes.update(seq.term_factorization(k).primes)
    return PrimeSet.explicit(sorted(primes), name=f"primes of {seq}, k <= {k_max}")


def decreasing_from(values: Sequence[float]) -> Optional[int]:
    """
    First index i such that values[i:] is strictly decreasing.

    None when the last step does not decrease (or fewer than two values):
    the finite prefix shows no decreasing tail.
    """
    n = len(values)
    if n < 2 or not values[-1] < values[-2]:
        return None
    i = n - 2
    while i > 0 and values[i] < values[i - 1]:
        i -= 1
    return i


# ============================================================================
# D_ALPHA TABLES
# ============================================================================

def alpha_fraction(alpha: float | Fraction | str) -> Fraction:
    """alpha as an exact rational in (0, 1) (decimal literals kept exact)."""
    try:
        value = alpha if isinstance(alpha, Fraction) else Fraction(str(alpha))
    except ValueError:
        raise DomainError(f"alpha must be a number, got {alpha!r}") from None
    require_open_unit_interval("alpha", value)
    return value


def _dalpha_row(task: tuple[ModulusSequence, int, Fraction, bool, int, int]) -> DalphaRow:
    seq, k, alpha, with_diameters, max_vertices, precision_bits = task
    cert = seq.order_certificate(k)
    N = cert.N
    size = N * cert.order
    with mpmath.workprec(precision_bits):
        a = mpmath.mpf(alpha.numerator) / alpha.denominator
        ratio_order = mpmath.mpf(cert.order) / mpmath.power(N, a / (1 - a))
        ratio_diam = alpha_hat = diam = None
        if with_diameters and size <= max_vertices:
            diam = diameter(build_graph(build_quotient(seq.m, N, cert), max_vertices))
            ratio_diam = float(mpmath.mpf(diam) / mpmath.power(size, a))
            if size > 1:
                alpha_hat = float(mpmath.log(diam) / mpmath.log(size))
        return DalphaRow(
            k=k,
            N_k=N,
            ord=cert.order,
            group_size=size,
            ratio_order=ratio_order,
            diameter=diam,
            ratio_diam=ratio_diam,
            alpha_hat=alpha_hat,
        )


def analyze_dalpha(
    seq: ModulusSequence,
    alpha: float | Fraction | str,
    k_max: int,
    with_diameters: bool = False,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    precision_bits: int = 96,
    jobs: int = 1,
) -> DalphaReport:
    """
    Per-k rows of ord_m(N_k)/N_k^(alpha/(1-alpha)) and, for groups under the
    vertex cap, diam/|G_k|^alpha and the empirical exponent ln(diam)/ln|G_k|.

    Orders are exact big integers; the real-valued ratios use mpmath at
    precision_bits.
    """
    a = alpha_fraction(alpha)
    require_positive("k_max", k_max)
    last = k_max if seq.length is None else min(k_max, seq.length)
    tasks = [(seq, k, a, with_diameters, max_vertices, precision_bits) for k in range(1, last + 1)]
    rows = ordered_map(_dalpha_row, tasks, jobs=jobs)
    return DalphaReport(m=seq.m, kind=seq.kind, alpha=float(a), rows=rows)


# ============================================================================
# COVERING CONSTRUCTION
# ============================================================================

@dataclass(frozen=True)
class CoveringParams:
    """n = ord_m(N) N^D and |G/M| = n N."""
    m: int
    N: int
    D: int
    n: int
    quotient_size: int
    alpha: Optional[Fraction] = None
    inequality_holds: Optional[bool] = None


def _power_le(base: int, p: int, other: int, q: int, precision_bits: int) -> bool:
    """base^(p/q) <= other, i.e. base^p <= other^q."""
    if q * max(other.bit_length(), 1) <= 10**6:
        return base**p <= other**q
    with mpmath.workprec(precision_bits):
        return p * mpmath.log(base) <= q * mpmath.log(other)


def covering_params(
    m: int,
    N: int,
    D: int,
    alpha: float | Fraction | str | None = None,
    precision_bits: int = 96,
) -> CoveringParams:
    """
    n = ord_m(N) N^D and the quotient size n N.

    With alpha given, also reports whether |G/M|^alpha = (n N)^alpha <= n.
    """
    require_base(m)
    require_positive("N", N)
    require_positive("D", D)
    require_coprime(m, N)
    order = mult_order(m, N).order
    n = order * N**D
    a = holds = None
    if alpha is not None:
        a = alpha_fraction(alpha)
        holds = _power_le(n * N, a.numerator, n, a.denominator, precision_bits)
    return CoveringParams(m=m, N=N, D=D, n=n, quotient_size=n * N, alpha=a, inequality_holds=holds)


def covers_residues(residues: Iterable[int], n: int) -> bool:
    """True when the residues mod n exhaust Z/nZ."""
    return {r % n for r in residues} == set(range(n))


@dataclass(frozen=True)
class CoveringReport:
    """Checks on the covering quotient G/M of order n N."""
    params: CoveringParams
    order: int
    homomorphism_ok: bool
    pairs_checked: int
    exhaustive: bool
    kernel_size: int
    kernel_ok: bool
    cyclic_image_ok: bool
    diameter: Optional[int] = None
    diameter_ok: Optional[bool] = None
    notes: list[str] = field(default_factory=list)

    @property
    def diameter_skipped(self) -> bool:
        return self.diameter_ok is None

    @property
    def passed(self) -> bool:
        return (
            self.homomorphism_ok
            and self.kernel_ok
            and self.cyclic_image_ok
            and self.diameter_ok is not False
        )

    def __bool__(self) -> bool:
        return self.passed


def verify_covering(
    m: int,
    N: int,
    D: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    samples: int = 10_000,
    seed: int = 0,
) -> CoveringReport:
    """
    Check the covering quotient G/M for n = ord_m(N) N^D.

    (a) the projection onto G_m/G_m(N) is a homomorphism with kernel of size
    n / ord_m(N); (b) k mod n is a homomorphism onto Z/nZ; (c) the diameter
    is at least n/3. Pairs are exhaustive up to 10^6, sampled above; the
    diameter check is skipped (and noted) above the vertex cap.
    """
    params = covering_params(m, N, D)
    cert = mult_order(m, N)
    base = build_quotient(m, N, cert)
    cover = build_covering_quotient(m, N, params.n, cert)
    size = cover.size
    notes: list[str] = []

    exhaustive = size * size <= EXHAUSTIVE_PAIR_LIMIT
    if exhaustive:
        elements = list(cover.elements())
        pairs = ((u, v) for u in elements for v in elements)
        pairs_checked = size * size
    else:
        rng = random.Random(seed)
        pairs = (
            (cover.element_at(rng.randrange(size)), cover.element_at(rng.randrange(size)))
            for _ in range(samples)
        )
        pairs_checked = samples
        notes.append(f"homomorphism checks sampled on {samples} pairs")

    homomorphism_ok = True
    k_additive = True
    n = params.n
    for u, v in pairs:
        uv = q_mul(cover, u, v)
        if project(uv, base) != q_mul(base, project(u, base), project(v, base)):
            homomorphism_ok = False
        if uv.k % n != (u.k + v.k) % n:
            k_additive = False

    if size <= max_vertices:
        image = (u.k for u in cover.elements())
    else:
        t = cover.generators()["t"]
        image = (j * t.k for j in range(n))
        notes.append("cyclic image taken over the powers of t")
    cyclic_ok = k_additive and covers_residues(image, n)

    if size <= max_vertices:
        kernel_size = sum(1 for u in cover.elements() if project(u, base) == base.identity)
    else:
        kernel_size = cover.L // base.L
        notes.append("kernel size counted from the k-coordinate only")
    kernel_ok = kernel_size == n // cert.order

    diam = diameter_ok = None
    if size <= max_vertices:
        diam = diameter(build_graph(cover, max_vertices))
        diameter_ok = 3 * diam >= n
    else:
        notes.append(f"diameter check skipped: {size} vertices above the cap {max_vertices}")
        logger.warning("verify_covering(%d, %d, %d): diameter check skipped", m, N, D)

    return CoveringReport(
        params=params,
        order=cert.order,
        homomorphism_ok=homomorphism_ok,
        pairs_checked=pairs_checked,
        exhaustive=exhaustive,
        kernel_size=kernel_size,
        kernel_ok=kernel_ok,
        cyclic_image_ok=cyclic_ok,
        diameter=diam,
        diameter_ok=diameter_ok,
        notes=notes,
    )

