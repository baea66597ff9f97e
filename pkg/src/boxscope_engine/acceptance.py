"""
Boxscope Engine Verification Suites

Named suites of exact checks, each returning pass/fail per criterion.
Asymptotic statements are replaced by their exact finite-prefix identities
and interval checks.
"""
from __future__ import annotations

import logging
import random
import time
from fractions import Fraction
from math import gcd
from typing import Callable, Iterator

import sympy

from boxscope_engine.arith import (
    eta,
    factorize,
    lift_order,
    mult_order,
    mult_order_bruteforce,
)
from boxscope_engine.boxspace import analyze_dalpha, decreasing_from, make_sequence, verify_covering
from boxscope_engine.cayley import build_graph, diameter, within_bounds
from boxscope_engine.density import PrimeSet, euler_product_sequence, totient_ratio_bound
from boxscope_engine.group import (
    BSElem,
    Generator,
    NormalForm,
    RingElem,
    Word,
    bs_mul,
    eval_word,
    normal_form,
    synthesis_bound,
    synthesize_word,
)
from boxscope_engine.models import BoxscopeSettings, CriterionResult, SequenceKind
from boxscope_engine.oddorder import UnitSpec, odd_order_moduli
from boxscope_engine.quotient import build_quotient, is_congruence_member, q_mul, reduce
from boxscope_engine.sweep import sweep_diameters
from boxscope_engine.validation import UsageError

logger = logging.getLogger(__name__)

ORACLE_BASES = (2, 3, 5, 6, 10)
ORACLE_LIMIT = 5000
LIFT_LIMIT = 200
LIFT_MAX_K = 4
DIAMETER_BASES = (2, 3)
DIAMETER_N_LIMIT = 3000
DIAMETER_SIZE_LIMIT = 200_000
HOMOMORPHISM_CASES = ((2, 5), (2, 9), (3, 7))
KERNEL_WORD_LENGTH = 8


def _timed(name: str, check: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    passed, detail = check()
    elapsed = (time.perf_counter() - start) * 1000
    logger.debug("criterion %s: %s in %.1f ms", name, "pass" if passed else "FAIL", elapsed)
    return CriterionResult(name=name, passed=passed, detail=detail, elapsed_ms=elapsed)


def random_word(rng: random.Random, max_length: int) -> Word:
    gens = list(Generator)
    return Word(tuple(rng.choice(gens) for _ in range(rng.randint(0, max_length))))


def random_element(rng: random.Random, m: int) -> BSElem:
    return BSElem(rng.randint(-20, 20), RingElem.of(rng.randint(-10**6, 10**6), rng.randint(0, 10), m))


def words_up_to(m: int, length: int) -> Iterator[tuple[Word, BSElem]]:
    """Every word of length <= length with its value, built incrementally."""
    images = {g: g.element(m) for g in Generator}
    layer = [(Word(), BSElem.identity(m))]
    for _ in range(length + 1):
        yield from layer
        layer = [(w + Word((g,)), bs_mul(x, images[g])) for w, x in layer for g in Generator]


# ============================================================================
# SUITES
# ============================================================================

def suite_worked_example(settings: BoxscopeSettings) -> list[CriterionResult]:
    def order_check():
        cert = mult_order(2, 5)
        return cert.order == 4 and cert.mu == 3, f"ord_2(5) = {cert.order}, mu = {cert.mu}"

    def quotient_check():
        Q = build_quotient(2, 5)
        return (Q.N, Q.L, Q.size) == (5, 4, 20), f"{Q}, size {Q.size}"

    def diameter_check():
        d = diameter(build_graph(build_quotient(2, 5)), check_transitivity=True, seed=settings.seed)
        return d == 3, f"diameter(Q(2, 5)) = {d}"

    return [
        _timed("order 2 5", order_check),
        _timed("quotient 2 5", quotient_check),
        _timed("diameter 2 5", diameter_check),
    ]


def suite_order_oracle(settings: BoxscopeSettings) -> list[CriterionResult]:
    def check():
        checked = 0
        for m in ORACLE_BASES:
            for N in range(1, ORACLE_LIMIT + 1):
                if gcd(m, N) != 1:
                    continue
                cert = mult_order(m, N)
                cert.verify()
                brute = mult_order_bruteforce(m, N, settings.oracle_cap)
                if cert.order != brute:
                    return False, f"ord_{m}({N}): structural {cert.order}, brute force {brute}"
                checked += 1
        return True, f"{checked} (m, N) pairs agree"

    return [_timed("structural order = brute-force order", check)]


def suite_lifting(settings: BoxscopeSettings) -> list[CriterionResult]:
    reports = [
        lift_order(m, N, k)
        for m in DIAMETER_BASES
        for N in range(2, LIFT_LIMIT + 1)
        if gcd(m, N) == 1
        for k in range(1, LIFT_MAX_K + 1)
    ]

    def exact_low_k():
        bad = [r for r in reports if r.k <= 2 and not r.exact]
        return not bad, f"{len(bad)} mismatches for k <= 2" + (f", first {bad[0]}" if bad else "")

    def divides_all():
        bad = [r for r in reports if not r.divides]
        return not bad, f"ord_m(N^k) divides ord_m(N) eta_N(k) in {len(reports) - len(bad)} of {len(reports)} cases"

    def exact_odd_primes():
        bad = [r for r in reports if r.N % 2 and sympy.isprime(r.N) and not r.exact]
        return not bad, f"{len(bad)} mismatches over odd primes N <= {LIFT_LIMIT}"

    def eta_lower_bound():
        bad = [
            (m, N, k)
            for m in DIAMETER_BASES
            for N in range(2, LIFT_LIMIT + 1)
            if gcd(m, N) == 1
            for k in range(1, LIFT_MAX_K + 1)
            if eta(m, N, k) * N**2 < N**k
        ]
        return not bad, f"eta_N(k) >= N^(k-2) failed {len(bad)} times"

    return [
        _timed("lifting exact for k <= 2", exact_low_k),
        _timed("lifting is a multiple for k <= 4", divides_all),
        _timed("lifting exact for odd primes", exact_odd_primes),
        _timed("eta lower bound", eta_lower_bound),
    ]


def suite_geometric(settings: BoxscopeSettings) -> list[CriterionResult]:
    def check():
        for m in (2, 3, 5):
            seq = make_sequence(m, SequenceKind.GEOMETRIC)
            for k in range(1, 7):
                cert = seq.order_certificate(k)
                expected = 2 * (m * m - 1) ** (k - 1)
                if cert.order != expected:
                    return False, f"ord_{m}(({m}^2-1)^{k}) = {cert.order}, expected {expected}"
                if Fraction(cert.order, cert.N) != Fraction(2, m * m - 1):
                    return False, f"ratio ord/N for m = {m}, k = {k} is not 2/{m * m - 1}"
        return True, "ord = 2(m^2-1)^(k-1) and ord/N = 2/(m^2-1) for m in {2,3,5}, k <= 6"

    return [_timed("geometric family orders", check)]


def suite_doubly_exponential(settings: BoxscopeSettings) -> list[CriterionResult]:
    def orders():
        for m in (2, 3):
            seq = make_sequence(m, SequenceKind.DOUBLY_EXPONENTIAL)
            for k in range(1, 6):
                N = seq.term(k)
                if pow(m, 2**k, N) != 1 or any(pow(m, 2**j, N) == 1 for j in range(k)):
                    return False, f"structural order check failed for m = {m}, k = {k}"
                if seq.order_certificate(k).order != 2**k:
                    return False, f"ord_{m}({m}^(2^{k})-1) != 2^{k}"
        return True, "ord_m(m^(2^k)-1) = 2^k for m in {2,3}, k <= 5"

    def ratio_trend():
        report = analyze_dalpha(
            make_sequence(2, SequenceKind.DOUBLY_EXPONENTIAL), 0.1, 6,
            precision_bits=settings.precision_bits,
        )
        values = [row.ratio_order for row in report.rows]
        onset = decreasing_from(values)
        if onset is None:
            return False, "alpha = 0.1 ratios show no decreasing tail for k <= 6"
        return True, f"alpha = 0.1 ratios strictly decrease from k = {onset + 1} to k = {len(values)}"

    return [
        _timed("doubly exponential family orders", orders),
        _timed("doubly exponential alpha = 0.1 trend", ratio_trend),
    ]


def suite_diameter_bounds(settings: BoxscopeSettings) -> list[CriterionResult]:
    def bounds():
        checked = 0
        for m in DIAMETER_BASES:
            moduli = [
                N for N in range(2, DIAMETER_N_LIMIT + 1)
                if gcd(m, N) == 1 and N * mult_order(m, N).order <= DIAMETER_SIZE_LIMIT
            ]
            records = sweep_diameters(m, moduli, max_vertices=DIAMETER_SIZE_LIMIT, jobs=settings.jobs)
            for record in records:
                if record.diameter is None or not within_bounds(m, record.ord, record.diameter):
                    return False, f"diameter {record.diameter} of Q({m}, {record.N}) outside bounds"
                checked += 1
        return True, f"{checked} quotients within [ord/3, C_m ord]"

    def worked():
        d = diameter(build_graph(build_quotient(2, 5)))
        return d == 3, f"diameter(Q(2, 5)) = {d}"

    return [_timed("diameter bounds", bounds), _timed("diameter of Q(2, 5)", worked)]


def suite_homomorphism(settings: BoxscopeSettings) -> list[CriterionResult]:
    def multiplicative():
        rng = random.Random(settings.seed)
        for m, N in HOMOMORPHISM_CASES:
            Q = build_quotient(m, N)
            for _ in range(settings.samples):
                x, y = random_element(rng, m), random_element(rng, m)
                if reduce(bs_mul(x, y), Q) != q_mul(Q, reduce(x, Q), reduce(y, Q)):
                    return False, f"reduce is not multiplicative on {x}, {y} in Q({m}, {N})"
        return True, f"{settings.samples} random pairs per (m, N) in {list(HOMOMORPHISM_CASES)}"

    def kernel():
        total = 0
        for m, N in HOMOMORPHISM_CASES:
            Q = build_quotient(m, N)
            for w, g in words_up_to(m, KERNEL_WORD_LENGTH):
                if is_congruence_member(g, m, N) != (reduce(g, Q) == Q.identity):
                    return False, f"membership disagrees on word {w!s} in Q({m}, {N})"
                total += 1
        return True, f"{total} words of length <= {KERNEL_WORD_LENGTH}"

    return [_timed("reduce is a homomorphism", multiplicative), _timed("kernel = congruence subgroup", kernel)]


def suite_covering(settings: BoxscopeSettings) -> list[CriterionResult]:
    def case(m: int, N: int, D: int):
        def check():
            report = verify_covering(m, N, D, settings.max_vertices, settings.samples, settings.seed)
            detail = (
                f"n = {report.params.n}, size {report.params.quotient_size}, kernel {report.kernel_size}, "
                f"diameter {report.diameter}"
            )
            return report.passed and report.diameter_ok is True, detail
        return check

    return [
        _timed("covering (2, 3, 1)", case(2, 3, 1)),
        _timed("covering (2, 5, 1)", case(2, 5, 1)),
    ]


def suite_density(settings: BoxscopeSettings) -> list[CriterionResult]:
    def envelope():
        for m in (2, 3):
            for N in range(2, ORACLE_LIMIT + 1):
                if gcd(m, N) != 1:
                    continue
                ratio = Fraction(mult_order(m, N).order, N)
                if ratio > totient_ratio_bound(factorize(N)):
                    return False, f"ord_{m}({N})/{N} exceeds phi(N)/N"
        return True, f"ord/N <= phi(N)/N for all N <= {ORACLE_LIMIT}, m in {{2, 3}}"

    def euler():
        values = euler_product_sequence(PrimeSet.all_primes(), 100)
        ok = all(b < a for a, b in zip(values, values[1:]))
        return ok, f"first 100 partial products, last = {float(values[-1]):.12g}"

    return [_timed("totient envelope", envelope), _timed("Euler product decreasing", euler)]


def suite_odd_order(settings: BoxscopeSettings) -> list[CriterionResult]:
    def check():
        s = UnitSpec.parse(2, 1, 2)
        found = odd_order_moduli(s, 2, settings.oddorder_k_max)
        pairs = [(r.N, r.order) for r in found]
        if pairs != [(7, 3), (31, 5)]:
            return False, f"first moduli {pairs}, expected [(7, 3), (31, 5)]"
        for r in found:
            direct = mult_order_bruteforce(s.residue(r.N), r.N, settings.oracle_cap)
            if direct != r.order or direct % 2 == 0 or r.k % direct:
                return False, f"direct order {direct} mod {r.N} fails the odd-order check"
        return True, f"moduli {pairs}"

    return [_timed("odd-order moduli for s = 2", check)]


def suite_normal_form(settings: BoxscopeSettings) -> list[CriterionResult]:
    def round_trip():
        rng = random.Random(settings.seed)
        for _ in range(settings.samples):
            m = rng.choice((2, 3, 5))
            w = random_word(rng, 30)
            nf = normal_form(w, m)
            if nf.element(m) != eval_word(w, m) or not nf.is_canonical(m):
                return False, f"normal form {nf} of {w} (m = {m}) does not evaluate back"
        return True, f"{settings.samples} random words"

    def synthesis():
        rng = random.Random(settings.seed + 1)
        for _ in range(settings.samples):
            m = rng.choice((2, 3, 5))
            nf = NormalForm(rng.randint(0, 12), rng.randint(-10**9, 10**9), rng.randint(0, 12)).renormalize(m)
            w = synthesize_word(nf, m)
            if eval_word(w, m) != nf.element(m) or len(w) > synthesis_bound(nf, m):
                return False, f"synthesized word for {nf} (m = {m}) is wrong or too long"
        return True, f"{settings.samples} random normal forms within (m+2)(i+j+log_m(|l|+1)+1)"

    return [_timed("normal form round trip", round_trip), _timed("word synthesis", synthesis)]


SUITES: dict[str, Callable[[BoxscopeSettings], list[CriterionResult]]] = {
    "worked-example": suite_worked_example,
    "order-oracle": suite_order_oracle,
    "lifting": suite_lifting,
    "geometric": suite_geometric,
    "doubly-exponential": suite_doubly_exponential,
    "diameter-bounds": suite_diameter_bounds,
    "homomorphism": suite_homomorphism,
    "covering": suite_covering,
    "density": suite_density,
    "odd-order": suite_odd_order,
    "normal-form": suite_normal_form,
}


def run_suite(name: str, settings: BoxscopeSettings) -> list[CriterionResult]:
    """Run one named suite, or every suite for 'all'."""
    if name == "all":
        return [result for suite in SUITES.values() for result in suite(settings)]
    if name not in SUITES:
        raise UsageError(f"suite must be one of {', '.join([*SUITES, 'all'])}, got {name!r}")
    return SUITES[name](settings)
