"""
Boxscope Engine Group Arithmetic

Exact arithmetic in G_m = BS(1, m) = <a, t | t a t^-1 = a^m> through the
standard embedding (k, r) <-> [[m^k, r], [0, 1]] with r in Z[1/m].

Words are strings over {a, A, t, T} (capital = inverse). Normal forms
t^-i a^ell t^j are computed algebraically from the evaluated element, never
by string rewriting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Union

from boxscope_engine.validation import DomainError, InvariantViolation, require_base


# ============================================================================
# Z[1/m]
# ============================================================================

@dataclass(frozen=True)
class RingElem:
    """num / m^exp in canonical form: exp = 0 or m does not divide num."""
    num: int
    exp: int
    m: int

    @classmethod
    def of(cls, num: int, exp: int, m: int) -> RingElem:
        """Canonicalize num / m^exp (exp may be negative)."""
        if exp < 0:
            return cls(num * m ** (-exp), 0, m)
        if num == 0:
            return cls(0, 0, m)
        while exp > 0 and num % m == 0:
            num //= m
            exp -= 1
        return cls(num, exp, m)

    @classmethod
    def zero(cls, m: int) -> RingElem:
        return cls(0, 0, m)

    @classmethod
    def from_fraction(cls, value: Fraction, m: int) -> RingElem:
        """Convert a rational whose denominator divides a power of m."""
        den = value.denominator
        exp = 0
        while m ** exp % den:
            exp += 1
            if exp > den.bit_length():
                raise DomainError(f"{value} is not in Z[1/{m}]")
        return cls.of(int(value * m ** exp), exp, m)

    def __post_init__(self):
        if self.exp < 0 or (self.exp > 0 and self.num % self.m == 0):
            raise InvariantViolation(f"RingElem({self.num}, {self.exp}) is not canonical for m = {self.m}")

    def _check(self, other: RingElem) -> None:
        if other.m != self.m:
            raise DomainError(f"cannot combine elements of Z[1/{self.m}] and Z[1/{other.m}]")

    def __add__(self, other: RingElem) -> RingElem:
        self._check(other)
        e = max(self.exp, other.exp)
        num = self.num * self.m ** (e - self.exp) + other.num * self.m ** (e - other.exp)
        return RingElem.of(num, e, self.m)

    def __neg__(self) -> RingElem:
        return RingElem(-self.num, self.exp, self.m)

    def __sub__(self, other: RingElem) -> RingElem:
        return self + (-other)

    def scale(self, k: int) -> RingElem:
        """Multiply by m^k for any integer k."""
        return RingElem.of(self.num, self.exp - k, self.m)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.m ** self.exp)

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{self.m}^{self.exp}" if self.exp > 1 else f"{self.num}/{self.m}"


# ============================================================================
# BS(1, m)
# ============================================================================

@dataclass(frozen=True)
class BSElem:
    """The matrix [[m^k, r], [0, 1]]."""
    k: int
    r: RingElem

    @property
    def m(self) -> int:
        return self.r.m

    @classmethod
    def identity(cls, m: int) -> BSElem:
        return cls(0, RingElem.zero(m))

    @classmethod
    def gen_a(cls, m: int) -> BSElem:
        return cls(0, RingElem(1, 0, m))

    @classmethod
    def gen_t(cls, m: int) -> BSElem:
        return cls(1, RingElem.zero(m))

    @classmethod
    def of(cls, k: int, r: Union[int, Fraction], m: int) -> BSElem:
        value = Fraction(r)
        return cls(k, RingElem.from_fraction(value, m))

    def __mul__(self, other: BSElem) -> BSElem:
        return bs_mul(self, other)

    def inverse(self) -> BSElem:
        return bs_inv(self)

    def __pow__(self, n: int) -> BSElem:
        base = self if n >= 0 else self.inverse()
        result = BSElem.identity(self.m)
        for _ in range(abs(n)):
            result = result * base
        return result

    @property
    def is_identity(self) -> bool:
        return self.k == 0 and self.r.is_zero

    def as_matrix(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Exact 2x2 rational matrix of the standard embedding."""
        return (
            (Fraction(self.m) ** self.k, self.r.as_fraction()),
            (Fraction(0), Fraction(1)),
        )

    def __str__(self) -> str:
        return f"(k={self.k}, r={self.r})"


def bs_mul(x: BSElem, y: BSElem) -> BSElem:
    """(k1, r1)(k2, r2) = (k1 + k2, r1 + m^k1 r2)."""
    return BSElem(x.k + y.k, x.r + y.r.scale(x.k))


def bs_inv(x: BSElem) -> BSElem:
    """(k, r)^-1 = (-k, -m^-k r)."""
    return BSElem(-x.k, -x.r.scale(-x.k))


# ============================================================================
# WORDS
# ============================================================================

class Generator(str, Enum):
    """Generators in edge order a, A, t, T (capital = inverse)."""
    a = "a"
    A = "A"
    t = "t"
    T = "T"

    @property
    def inverse(self) -> Generator:
        return _INVERSES[self]

    def element(self, m: int) -> BSElem:
        if self is Generator.a:
            return BSElem.gen_a(m)
        if self is Generator.A:
            return bs_inv(BSElem.gen_a(m))
        if self is Generator.t:
            return BSElem.gen_t(m)
        return bs_inv(BSElem.gen_t(m))


_INVERSES = {
    Generator.a: Generator.A,
    Generator.A: Generator.a,
    Generator.t: Generator.T,
    Generator.T: Generator.t,
}


@dataclass(frozen=True)
class Word:
    """A word over {a, A, t, T}."""
    letters: tuple[Generator, ...] = ()

    @classmethod
    def parse(cls, text: str) -> Word:
        """One letter per symbol, no separators."""
        letters = []
        for pos, ch in enumerate(text.strip()):
            try:
                letters.append(Generator(ch))
            except ValueError:
                raise DomainError(
                    f"word letters must be in {{a, A, t, T}}, got {ch!r} at position {pos}"
                ) from None
        return cls(tuple(letters))

    @classmethod
    def of(cls, letters: Iterable[Generator]) -> Word:
        return cls(tuple(letters))

    @classmethod
    def power(cls, gen: Generator, n: int) -> Word:
        """gen^n, using the inverse letter when n < 0."""
        letter = gen if n >= 0 else gen.inverse
        return cls((letter,) * abs(n))

    def __len__(self) -> int:
        return len(self.letters)

    def __add__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __str__(self) -> str:
        return "".join(g.value for g in self.letters)

    def inverse(self) -> Word:
        return Word(tuple(g.inverse for g in reversed(self.letters)))

    def free_reduce(self) -> Word:
        """Cancel adjacent inverse pairs."""
        stack: list[Generator] = []
        for g in self.letters:
            if stack and stack[-1] is g.inverse:
                stack.pop()
            else:
                stack.append(g)
        return Word(tuple(stack))


def eval_word(w: Word, m: int) -> BSElem:
    """Left-to-right product of generator images A = (0, 1), T = (1, 0)."""
    require_base(m)
    images = {g: g.element(m) for g in Generator}
    result = BSElem.identity(m)
    for g in w.letters:
        result = bs_mul(result, images[g])
    return result


# ============================================================================
# NORMAL FORMS
# ============================================================================

@dataclass(frozen=True)
class NormalForm:
    """t^-i a^ell t^j."""
    i: int
    ell: int
    j: int

    def __post_init__(self):
        if self.i < 0 or self.j < 0:
            raise DomainError(f"i >= 0 and j >= 0 required, got (i, j) = ({self.i}, {self.j})")

    def element(self, m: int) -> BSElem:
        """Evaluate t^-i a^ell t^j = (j - i, ell / m^i)."""
        return BSElem(self.j - self.i, RingElem.of(self.ell, self.i, m))

    def is_canonical(self, m: int) -> bool:
        return not (self.i > 0 and self.j > 0 and self.ell % m == 0)

    def renormalize(self, m: int) -> NormalForm:
        return normal_form(self.element(m), m)

    def __str__(self) -> str:
        return f"t^-{self.i} a^{self.ell} t^{self.j}"


def normal_form(w: Union[Word, BSElem], m: int) -> NormalForm:
    """
    The unique (i, ell, j) with t^-i a^ell t^j equal to w.

    From the element (k, num / m^e): i = e, ell = num, j = i + k; when j < 0
    the t^-1 prefix absorbs the deficit (i += -j, ell *= m^-j, j = 0).
    """
    require_base(m)
    g = eval_word(w, m) if isinstance(w, Word) else w
    i, ell, j = g.r.exp, g.r.num, g.r.exp + g.k
    if j < 0:
        d = -j
        i += d
        ell *= m ** d
        j = 0
    nf = NormalForm(i, ell, j)
    if not nf.is_canonical(m):
        raise InvariantViolation(f"normal form {nf} violates the divisibility condition for m = {m}")
    return nf


def _horner_word(ell: int, m: int) -> Word:
    """
    A word for a^ell from the base-m digits of |ell|.

    t a^x T = a^(mx), so d_n...d_0 unfolds as t^n a^d_n T a^d_(n-1) ... T a^d_0.
    """
    if ell == 0:
        return Word()
    letter = Generator.a if ell > 0 else Generator.A
    digits = []
    rest = abs(ell)
    while rest:
        rest, d = divmod(rest, m)
        digits.append(d)
    digits.reverse()
    word = Word.power(Generator.t, len(digits) - 1) + Word((letter,) * digits[0])
    for d in digits[1:]:
        word = word + Word((Generator.T,) + (letter,) * d)
    return word


def synthesis_bound(nf: NormalForm, m: int) -> float:
    """(m + 2)(i + j + log_m(|ell| + 1) + 1), the certified synthesis length."""
    return (m + 2) * (nf.i + nf.j + math.log(abs(nf.ell) + 1, m) + 1)


def synthesize_word(nf: NormalForm, m: int) -> Word:
    """
    A word evaluating to nf, of length at most synthesis_bound(nf, m).

    The input is renormalized first; the result is freely reduced.
    """
    require_base(m)
    canon = nf.renormalize(m)
    word = (
        Word.power(Generator.T, canon.i)
        + _horner_word(canon.ell, m)
        + Word.power(Generator.t, canon.j)
    ).free_reduce()
    if len(word) > synthesis_bound(canon, m):
        raise InvariantViolation(f"synthesized word for {canon} exceeds its length bound")
    return word


def length_bounds(
    nf: NormalForm,
    m: int,
    c1: Optional[float] = None,
    d1: Optional[float] = None,
) -> tuple[Optional[float], float]:
    """
    Word-length envelope for a normal form (natural log).

    upper = m(i + j + ln|ell|) + m. The lower bound c1(i + j + ln|ell|) - d1
    is only returned when the caller supplies c1 and d1. A pure t-power
    (ell = 0) reports (0, i + j); i + j is its exact length.
    """
    require_base(m)
    canon = nf.renormalize(m)
    if canon.ell == 0:
        return 0.0, float(canon.i + canon.j)
    size = canon.i + canon.j + math.log(abs(canon.ell))
    upper = m * size + m
    lower = None
    if c1 is not None and d1 is not None:
        lower = max(0.0, c1 * size - d1)
    return lower, upper
