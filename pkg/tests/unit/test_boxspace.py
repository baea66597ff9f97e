"""
Unit Tests for Boxscope Box Spaces

Modulus sequences, D_alpha trend tables and the covering-quotient
construction.
"""
import math
from fractions import Fraction

import mpmath
import pytest

from boxscope_engine.boxspace import (
    alpha_fraction,
    analyze_dalpha,
    covering_params,
    covers_residues,
    decreasing_from,
    make_sequence,
    prime_support,
    verify_covering,
)
from boxscope_engine.models import SequenceKind, format_real
from boxscope_engine.validation import ChainValidationError, DomainError


# ============================================================================
# Sequences
# ============================================================================

class TestMakeSequence:
    def test_geometric_terms(self):
        """(m^2 - 1)^k."""
        seq = make_sequence(2, SequenceKind.GEOMETRIC)
        assert seq.terms(4) == [3, 9, 27, 81]
        assert seq.length is None
        assert str(seq) == "(2^2 - 1)^k"

    def test_doubly_exponential_terms(self):
        """m^(2^k) - 1."""
        seq = make_sequence(2, SequenceKind.DOUBLY_EXPONENTIAL)
        assert seq.terms(4) == [3, 15, 255, 65535]
        assert str(seq) == "2^(2^k) - 1"

    def test_explicit_terms(self):
        """Explicit chains are kept as given."""
        seq = make_sequence(2, SequenceKind.EXPLICIT, [3, 9, 27])
        assert seq.terms(10) == [3, 9, 27]
        assert seq.length == 3
        assert str(seq) == "[3, 9, 27]"

    def test_explicit_term_out_of_range(self):
        """k beyond an explicit list is rejected."""
        seq = make_sequence(2, SequenceKind.EXPLICIT, [3, 9])
        with pytest.raises(DomainError, match="k <= 2"):
            seq.term(3)

    @pytest.mark.parametrize(
        "terms,index,message",
        [
            ([3, 6], 2, "gcd"),
            ([3, 5], 2, "does not divide"),
            ([3, 9, 10], 3, "gcd"),
            ([0, 3], 1, ">= 1"),
        ],
    )
    def test_chain_validation(self, terms, index, message):
        """The first offending term is reported with its 1-based index."""
        with pytest.raises(ChainValidationError, match=message) as excinfo:
            make_sequence(2, SequenceKind.EXPLICIT, terms)
        assert excinfo.value.index == index

    def test_terms_need_explicit_kind(self):
        """Families do not accept a term list."""
        with pytest.raises(DomainError, match="explicit"):
            make_sequence(2, SequenceKind.GEOMETRIC, [3, 9])

    def test_explicit_needs_terms(self):
        """An explicit sequence needs at least one term."""
        with pytest.raises(DomainError):
            make_sequence(2, SequenceKind.EXPLICIT, [])

    def test_base_checked(self):
        """m >= 2 required."""
        with pytest.raises(DomainError, match="m >= 2"):
            make_sequence(1, SequenceKind.GEOMETRIC)

    def test_prime_support(self):
        """Primes of N_1 .. N_k."""
        seq = make_sequence(2, SequenceKind.DOUBLY_EXPONENTIAL)
        assert prime_support(seq, 3).members == (3, 5, 17)
        assert prime_support(make_sequence(2, SequenceKind.GEOMETRIC), 5).members == (3,)


class TestFamilyOrders:
    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_geometric_orders(self, m):
        """ord_m((m^2 - 1)^k) = 2 (m^2 - 1)^(k - 1)."""
        seq = make_sequence(m, SequenceKind.GEOMETRIC)
        for k in range(1, 6):
            cert = seq.order_certificate(k)
            assert cert.order == 2 * (m * m - 1) ** (k - 1)
            cert.verify()

    @pytest.mark.parametrize("m", [2, 3])
    def test_doubly_exponential_orders(self, m):
        """ord_m(m^(2^k) - 1) = 2^k."""
        seq = make_sequence(m, SequenceKind.DOUBLY_EXPONENTIAL)
        for k in range(1, 7):
            assert seq.order_certificate(k).order == 2**k


# ============================================================================
# Trends
# ============================================================================

class TestDecreasingFrom:
    def test_tail(self):
        """Index where the strictly decreasing tail starts."""
        assert decreasing_from([1, 2, 3, 2, 1]) == 2
        assert decreasing_from([3, 2, 1]) == 0

    def test_no_tail(self):
        """None without a final decrease."""
        assert decreasing_from([1, 2]) is None
        assert decreasing_from([1, 1]) is None
        assert decreasing_from([5]) is None
        assert decreasing_from([]) is None


class TestAlphaFraction:
    def test_decimal_kept_exact(self):
        """0.1 becomes 1/10, not the nearest double."""
        assert alpha_fraction(0.1) == Fraction(1, 10)
        assert alpha_fraction("0.5") == Fraction(1, 2)
        assert alpha_fraction("1/3") == Fraction(1, 3)

    @pytest.mark.parametrize("alpha", [0, 1, 1.5, "-0.2"])
    def test_open_interval(self, alpha):
        """0 < alpha < 1 required."""
        with pytest.raises(DomainError, match="0 < alpha < 1"):
            alpha_fraction(alpha)

    def test_not_a_number(self):
        """Text that is not a number is rejected."""
        with pytest.raises(DomainError, match="alpha must be a number"):
            alpha_fraction("half")


class TestAnalyzeDalpha:
    def test_geometric_ratio_constant(self):
        """At alpha = 1/2, ord/N = 2/(m^2 - 1) for every k."""
        report = analyze_dalpha(make_sequence(2, SequenceKind.GEOMETRIC), "0.5", 5)
        assert [row.k for row in report.rows] == [1, 2, 3, 4, 5]
        for row in report.rows:
            assert float(row.ratio_order) == pytest.approx(2 / 3, rel=1e-12)
            assert row.group_size == row.N_k * row.ord
            assert row.diameter is None

    def test_doubly_exponential_tail(self):
        """alpha = 0.1 ratios decrease from k = 4 on."""
        report = analyze_dalpha(make_sequence(2, SequenceKind.DOUBLY_EXPONENTIAL), 0.1, 6)
        values = [row.ratio_order for row in report.rows]
        assert decreasing_from(values) == 3

    def test_tiny_ratio_keeps_digits(self):
        """At alpha = 0.9 and k = 100 the ratio (2/3) 3^-800 is far below the float range."""
        report = analyze_dalpha(make_sequence(2, SequenceKind.GEOMETRIC), "0.9", 100)
        last = report.rows[-1]
        assert last.ratio_order > 0
        expected = math.log10(2 / 3) - 800 * math.log10(3)
        assert float(mpmath.log10(last.ratio_order)) == pytest.approx(expected, rel=1e-12)
        assert format_real(last.ratio_order).endswith("e-382")
        assert last.model_dump(mode="json")["ratio_order"].endswith("e-382")

    def test_diameters_under_cap(self):
        """Diameter columns are filled only under the vertex cap."""
        report = analyze_dalpha(
            make_sequence(2, SequenceKind.GEOMETRIC), "0.5", 2, with_diameters=True, max_vertices=10
        )
        first, second = report.rows
        assert first.diameter == 2
        assert first.ratio_diam == pytest.approx(2 / math.sqrt(6))
        assert first.alpha_hat == pytest.approx(math.log(2) / math.log(6))
        assert second.diameter is None
        assert second.alpha_hat is None

    def test_explicit_sequence_length(self):
        """k_max is clipped to the explicit list."""
        seq = make_sequence(2, SequenceKind.EXPLICIT, [5, 25])
        report = analyze_dalpha(seq, "1/2", 10, with_diameters=True)
        assert [row.N_k for row in report.rows] == [5, 25]
        assert report.rows[0].diameter == 3
        assert report.coherence_violations() == []

    def test_k_max_positive(self):
        """k_max >= 1 required."""
        with pytest.raises(DomainError):
            analyze_dalpha(make_sequence(2, SequenceKind.GEOMETRIC), "0.5", 0)


# ============================================================================
# Covering construction
# ============================================================================

class TestCoveringParams:
    def test_small_cases(self):
        """n = ord_m(N) N^D and |G/M| = n N."""
        params = covering_params(2, 3, 1)
        assert (params.n, params.quotient_size) == (6, 18)
        params = covering_params(2, 5, 1)
        assert (params.n, params.quotient_size) == (20, 100)
        assert params.inequality_holds is None

    def test_alpha_inequality(self):
        """(n N)^alpha <= n holds at 1/2 and fails at 9/10 for (2, 5, 1)."""
        assert covering_params(2, 5, 1, "0.5").inequality_holds is True
        assert covering_params(2, 5, 1, 0.9).inequality_holds is False

    def test_large_exponent_uses_logs(self):
        """Huge powers fall back to an mpmath comparison."""
        params = covering_params(2, 3, 40, Fraction(999999, 1000000))
        assert params.inequality_holds is False

    def test_preconditions(self):
        """D >= 1 and gcd(m, N) = 1."""
        with pytest.raises(DomainError):
            covering_params(2, 3, 0)
        with pytest.raises(DomainError):
            covering_params(2, 6, 1)


class TestVerifyCovering:
    def test_exhaustive_small_case(self):
        """(2, 3, 1): every pair checked, kernel of size 3."""
        report = verify_covering(2, 3, 1)
        assert report.passed
        assert report.exhaustive
        assert report.pairs_checked == 18 * 18
        assert report.kernel_size == 3
        assert report.diameter_ok is True
        assert 3 * report.diameter >= 6

    def test_second_case(self):
        """(2, 5, 1): n = 20, kernel of size 5."""
        report = verify_covering(2, 5, 1)
        assert report.passed
        assert report.kernel_size == 5
        assert report.params.quotient_size == 100

    def test_diameter_skipped_above_cap(self):
        """Above the vertex cap the diameter check is skipped and noted."""
        report = verify_covering(2, 5, 1, max_vertices=50)
        assert report.diameter_skipped
        assert report.passed
        assert report.kernel_ok
        assert any("skipped" in note for note in report.notes)
        assert report.cyclic_image_ok
        assert "cyclic image taken over the powers of t" in report.notes

    def test_sampled_pairs(self):
        """Large quotients sample their homomorphism checks."""
        report = verify_covering(2, 7, 2, samples=200, seed=3)
        assert not report.exhaustive
        assert report.pairs_checked == 200
        assert report.kernel_size == 49
        assert report.passed

    def test_cyclic_image_full(self):
        """k mod n takes every value in Z/6Z on Q(2, 3) covers."""
        report = verify_covering(2, 3, 1)
        assert report.cyclic_image_ok


class TestCoversResidues:
    def test_full_image(self):
        """Multiples of a unit exhaust Z/nZ."""
        assert covers_residues((3 * j for j in range(10)), 10)
        assert covers_residues(range(40), 20)

    @pytest.mark.parametrize(
        "residues, n",
        [
            ([2 * j for j in range(10)], 10),
            (range(5), 6),
            ([], 3),
        ],
    )
    def test_missing_residue(self, residues, n):
        """A proper subgroup or a short range misses part of Z/nZ."""
        assert not covers_residues(residues, n)
