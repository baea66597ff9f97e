"""
Boxscope Engine Main Orchestrator

Binds the computation modules to one BoxscopeSettings so every caller (the
CLI, scripts, tests) applies the same caps, precision and worker count.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from boxscope_engine.acceptance import run_suite
from boxscope_engine.arith import LiftReport, OrderCertificate, factorize_or_one, lift_order, mult_order
from boxscope_engine.boxspace import (
    CoveringParams,
    CoveringReport,
    analyze_dalpha,
    covering_params,
    make_sequence,
    verify_covering,
)
from boxscope_engine.cayley import CayleyGraph, build_graph, diameter, diameter_bounds
from boxscope_engine.density import (
    EulerProduct,
    PrimeSet,
    RatioScan,
    analytic_density_partial,
    euler_product_partial,
    natural_density_partial,
    ratio_scan,
    totient_ratio_bound,
)
from boxscope_engine.group import NormalForm, Word, normal_form, synthesize_word
from boxscope_engine.models import BoxscopeSettings, CriterionResult, DalphaReport, ScanRecord, SequenceKind
from boxscope_engine.oddorder import OddOrderModulus, UnitSpec, odd_order_moduli
from boxscope_engine.quotient import QuotientGroup, build_quotient
from boxscope_engine.sweep import RecordStore, replay_record, sweep_diameters, sweep_moduli
from boxscope_engine.validation import require_base

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiameterResult:
    """BFS diameter of G_m / G_m(N) with its [ord/3, C_m ord] envelope."""
    m: int
    N: int
    order: int
    size: int
    diameter: int
    lower: float
    upper: float

    @property
    def within_bounds(self) -> bool:
        # The trivial group (N = 1) sits below ord/3.
        return self.size == 1 or self.lower <= self.diameter <= self.upper


@dataclass(frozen=True)
class ReplayResult:
    cached: ScanRecord
    fresh: ScanRecord
    matches: bool


class BoxscopeEngine:
    """
    Main boxscope computation engine.

    Every operation validates its own preconditions; the engine supplies the
    configured caps and worker count.
    """

    def __init__(self, settings: Optional[BoxscopeSettings] = None):
        self.settings = settings or BoxscopeSettings()

    # ------------------------------------------------------------------
    # Arithmetic and quotients
    # ------------------------------------------------------------------

    def order(self, m: int, N: int) -> OrderCertificate:
        require_base(m)
        cert = mult_order(m, N)
        cert.verify()
        return cert

    def lift(self, m: int, N: int, k: int) -> LiftReport:
        require_base(m)
        return lift_order(m, N, k)

    def quotient(self, m: int, N: int) -> QuotientGroup:
        require_base(m)
        return build_quotient(m, N)

    def graph(self, m: int, N: int) -> CayleyGraph:
        return build_graph(self.quotient(m, N), self.settings.max_vertices)

    def diameter(self, m: int, N: int) -> DiameterResult:
        G = self.graph(m, N)
        Q = G.group
        lower, upper = diameter_bounds(m, Q.order)
        return DiameterResult(
            m=m,
            N=N,
            order=Q.order,
            size=Q.size,
            diameter=diameter(G, seed=self.settings.seed),
            lower=lower,
            upper=upper,
        )

    def normal_form(self, m: int, word: str) -> tuple[NormalForm, Word]:
        """Normal form of a word and a synthesized word for it."""
        nf = normal_form(Word.parse(word), m)
        return nf, synthesize_word(nf, m)

    # ------------------------------------------------------------------
    # Box spaces
    # ------------------------------------------------------------------

    def scan(
        self,
        m: int,
        kind: SequenceKind,
        alpha: float | Fraction | str,
        k_max: int,
        with_diameters: bool = False,
        terms: Optional[Sequence[int]] = None,
    ) -> DalphaReport:
        seq = make_sequence(m, kind, terms)
        return analyze_dalpha(
            seq,
            alpha,
            k_max,
            with_diameters=with_diameters,
            max_vertices=self.settings.max_vertices,
            precision_bits=self.settings.precision_bits,
            jobs=self.settings.jobs,
        )

    def covering(self, m: int, N: int, D: int, alpha: Optional[float] = None) -> CoveringParams:
        return covering_params(m, N, D, alpha, self.settings.precision_bits)

    def verify_covering(self, m: int, N: int, D: int) -> CoveringReport:
        s = self.settings
        return verify_covering(m, N, D, s.max_vertices, s.samples, s.seed)

    def sweep(
        self,
        m: int,
        n_max: int,
        n_min: int = 1,
        cache: Optional[RecordStore] = None,
        on_result: Optional[Callable[[ScanRecord], None]] = None,
    ) -> list[ScanRecord]:
        require_base(m)
        return sweep_diameters(
            m,
            sweep_moduli(m, n_max, n_min),
            max_vertices=self.settings.max_vertices,
            jobs=self.settings.jobs,
            cache=cache,
            on_result=on_result,
        )

    def replay(self, records: Sequence[ScanRecord]) -> list[ReplayResult]:
        results = []
        for record in records:
            matches, fresh = replay_record(record, self.settings.max_vertices)
            if not matches:
                logger.warning("cache replay mismatch for (m, N) = (%d, %d)", record.m, record.N)
            results.append(ReplayResult(cached=record, fresh=fresh, matches=matches))
        return results

    # ------------------------------------------------------------------
    # Densities and odd orders
    # ------------------------------------------------------------------

    def natural_density(self, P: PrimeSet, x: int) -> Fraction:
        return natural_density_partial(P, x)

    def analytic_density(self, P: PrimeSet, s: float, cutoff: int) -> float:
        return analytic_density_partial(P, s, cutoff, self.settings.precision_bits)

    def euler_product(self, P: PrimeSet, count: int) -> EulerProduct:
        return euler_product_partial(P, count)

    def ratio_scan(self, m: int, primes: list[int], bound: int) -> RatioScan:
        return ratio_scan(m, primes, bound, jobs=self.settings.jobs)

    def totient_bound(self, N: int) -> Fraction:
        return totient_ratio_bound(factorize_or_one(N))

    def odd_order(self, a1: int, a2: int, m: int, count: int) -> list[OddOrderModulus]:
        return odd_order_moduli(UnitSpec.parse(a1, a2, m), count, self.settings.oddorder_k_max)

    # ------------------------------------------------------------------
    # Verification
    # ------------------------------------------------------------------

    def verify(self, suite: str) -> list[CriterionResult]:
        return run_suite(suite, self.settings)
