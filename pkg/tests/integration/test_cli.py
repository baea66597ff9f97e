"""
Integration Test - Command Line

Drives the boxscope Typer app end to end through CliRunner: output lines,
JSON-lines and CSV encodings, the cache round trip and exit codes.
"""
import json

import pytest
from typer.testing import CliRunner

from boxscope_io.readers import CACHE_ENV_VAR
from boxscope_ui_cli.cli import app

runner = CliRunner()


@pytest.fixture(autouse=True)
def no_cache_env(monkeypatch):
    monkeypatch.delenv(CACHE_ENV_VAR, raising=False)


def invoke(*args):
    return runner.invoke(app, ["-j", "1", *args])


def json_lines(result):
    return [json.loads(line) for line in result.output.splitlines() if line.startswith("{")]


def data_lines(result, header):
    """CSV header plus the rows after it."""
    lines = result.output.splitlines()
    start = lines.index(header)
    return [lines[start]] + [line for line in lines[start + 1:] if line and line[0].isdigit()]


# ============================================================================
# Orders, quotients and diameters
# ============================================================================

class TestOrderCommands:
    def test_order(self):
        """ord_2(5) = 4 with 16 = 3 * 5 + 1."""
        result = invoke("order", "2", "5")
        assert result.exit_code == 0
        assert "ord_2(5) = 4, mu = 3" in result.output

    def test_order_json(self):
        """One JSON object with the order and the full mu."""
        result = invoke("order", "2", "5", "--json")
        assert json_lines(result) == [{"m": 2, "N": 5, "ord": 4, "mu_mod_N": 3, "mu": 3}]

    def test_order_json_large_mu(self):
        """ord_2(3^6) = 486: mu has 144 digits and only mu mod N is emitted."""
        result = invoke("order", "2", "729", "--json")
        mu_mod_n = (pow(2, 486, 729 * 729) - 1) // 729 % 729
        assert json_lines(result) == [{"m": 2, "N": 729, "ord": 486, "mu_mod_N": mu_mod_n}]
        text = invoke("order", "2", "729")
        assert f"mu = {mu_mod_n} (mod 729)" in text.output

    def test_not_coprime(self):
        """gcd(6, 9) = 3 is a validation error naming the precondition."""
        result = invoke("order", "6", "9")
        assert result.exit_code == 2
        assert "gcd(m, N) = 1 required" in result.output

    def test_base_too_small(self):
        """m = 1 is rejected."""
        assert invoke("order", "1", "5").exit_code == 2

    def test_lift(self):
        """ord_3(2^3) = 2 against the prediction 4."""
        result = invoke("lift", "3", "2", "3", "--json")
        row = json_lines(result)[0]
        assert (row["actual"], row["predicted"]) == (2, 4)
        assert row["divides"] and not row["exact"]


class TestQuotientCommands:
    def test_quotient_json(self):
        """Z/5 x|_2 Z/4 of order 20."""
        result = invoke("quotient", "2", "5", "--json")
        assert result.exit_code == 0
        assert json_lines(result) == [
            {"m": 2, "N": 5, "ord": 4, "size": 20, "structure": "Z/5 x|_2 Z/4"}
        ]

    def test_diameter(self):
        """BFS diameter 3 with the envelope [4/3, C_2 * 4]."""
        result = invoke("diameter", "2", "5")
        assert result.exit_code == 0
        assert "diameter = 3, |G| = 20, bounds [1.33, 43.09]" in result.output

    def test_diameter_json(self):
        """within_bounds travels with the JSON row."""
        row = json_lines(invoke("diameter", "2", "3", "--json"))[0]
        assert row["diameter"] == 2
        assert row["within_bounds"]

    def test_vertex_cap(self):
        """A cap below |G| exits with the resource-cap code."""
        result = invoke("--max-vertices", "10", "diameter", "2", "5")
        assert result.exit_code == 3

    def test_distances(self, tmp_path):
        """--distances writes one row per vertex."""
        path = tmp_path / "d.csv"
        result = invoke("diameter", "2", "5", "--distances", str(path))
        assert result.exit_code == 0
        lines = path.read_text().splitlines()
        assert lines[0] == "vertex_index,x,k,distance"
        assert len(lines) == 21

    def test_export_dot(self, tmp_path):
        """DOT digraph with one edge per vertex and generator."""
        path = tmp_path / "q25.dot"
        result = invoke("export-dot", "2", "5", str(path))
        assert result.exit_code == 0
        assert "20 vertices" in result.output
        text = path.read_text()
        assert text.startswith("digraph")
        assert '  0 -> 1 [label="a"];' in text.splitlines()

    def test_normal_form(self):
        """Ta is t^-1 a t^0 and the short word stays inside the bound."""
        row = json_lines(invoke("normal-form", "2", "Ta", "--json"))[0]
        assert (row["i"], row["ell"], row["j"]) == (1, 1, 0)
        assert row["length"] <= row["upper_bound"]

    def test_bad_word(self):
        """Letters outside a, A, t, T are rejected."""
        assert invoke("normal-form", "2", "ax").exit_code == 2


# ============================================================================
# Box spaces
# ============================================================================

class TestScanCommands:
    def test_geometric_csv(self):
        """Four rows, each with ord / N^alpha = 2/3."""
        result = invoke("scan", "2", "geometric", "--alpha", "0.5", "--kmax", "4", "--csv")
        assert result.exit_code == 0
        lines = data_lines(result, "k,N_k,ord,group_size,ratio_order,diameter,ratio_diam,alpha_hat")
        assert len(lines) == 5
        assert all(line.split(",")[4] == "0.666666666667" for line in lines[1:])

    def test_geometric_json(self):
        """JSON rows carry the same values."""
        rows = json_lines(invoke("scan", "2", "geometric", "--alpha", "1/2", "--kmax", "3", "--json"))
        assert [r["N_k"] for r in rows] == [3, 9, 27]
        assert [r["ord"] for r in rows] == [2, 6, 18]

    def test_explicit_terms(self):
        """--terms gives an explicit chain."""
        rows = json_lines(
            invoke("scan", "2", "explicit", "--alpha", "0.5", "--kmax", "2", "--terms", "5,25", "--json")
        )
        assert [r["N_k"] for r in rows] == [5, 25]

    def test_broken_chain(self):
        """Non-nested moduli are a validation error."""
        result = invoke("scan", "2", "explicit", "--alpha", "0.5", "--kmax", "2", "--terms", "5,7")
        assert result.exit_code == 2

    def test_json_and_csv_exclusive(self):
        """Only one encoding per run."""
        result = invoke("scan", "2", "geometric", "--alpha", "0.5", "--kmax", "2", "--json", "--csv")
        assert result.exit_code == 2
        assert "mutually exclusive" in result.output

    def test_alpha_range(self):
        """alpha must lie in (0, 1)."""
        assert invoke("scan", "2", "geometric", "--alpha", "1.5", "--kmax", "2").exit_code == 2

    def test_xlsx(self, tmp_path):
        """--xlsx writes a workbook next to the table."""
        path = tmp_path / "scan.xlsx"
        result = invoke("scan", "2", "geometric", "--alpha", "0.5", "--kmax", "3", "--xlsx", str(path))
        assert result.exit_code == 0
        assert path.exists()


class TestCoveringCommand:
    def test_parameters(self):
        """n = ord_2(3) * 3 = 6, |G/M| = 18."""
        result = invoke("covering", "2", "3", "1")
        assert result.exit_code == 0
        assert "n = 6, |G/M| = 18" in result.output

    def test_verify(self):
        """Every check passes for (2, 3, 1)."""
        assert invoke("covering", "2", "3", "1", "--verify").exit_code == 0

    @pytest.mark.parametrize("alpha,holds", [("0.5", "True"), ("0.9", "False")])
    def test_alpha_inequality_label(self, alpha, holds):
        """(2, 5, 1): |G/M| = 100 and n = 20, so 100^(1/2) <= 20 but 100^(9/10) > 20."""
        result = invoke("covering", "2", "5", "1", "--alpha", alpha)
        assert result.exit_code == 0
        fraction = "1/2" if alpha == "0.5" else "9/10"
        assert f"|G/M|^alpha <= n with alpha = {fraction}: {holds}" in result.output


# ============================================================================
# Densities and odd orders
# ============================================================================

class TestDensityCommands:
    def test_natural(self):
        """Primes 1 mod 4 below 20: 3 of 8."""
        result = invoke("density", "natural", "20", "--residue", "1,4")
        assert result.exit_code == 0
        assert "= 3/8 ~ 0.375" in result.output

    def test_prime_options_exclusive(self):
        """--primes and --residue cannot be combined."""
        assert invoke("density", "natural", "20", "--primes", "2", "--residue", "1,4").exit_code == 2

    def test_euler(self):
        """(1/2)(2/3)(4/5) = 4/15."""
        result = invoke("density", "euler", "3")
        assert "over 3 primes = 0.266666666667" in result.output

    def test_euler_csv(self):
        """Every partial product as exact fractions."""
        lines = data_lines(invoke("density", "euler", "3", "--csv"), "count,product,decimal")
        assert [line.split(",")[1] for line in lines[1:]] == ["1/2", "1/3", "4/15"]

    def test_ratio_scan(self):
        """Minimum 2/3 at N = 3 over 3-smooth moduli for m = 2."""
        result = invoke("density", "ratio-scan", "2", "--primes", "3", "--bound", "27", "--json")
        rows = json_lines(result)
        assert [r["N"] for r in rows] == [1, 3, 9, 27]
        assert rows[1]["ratio"] == "2/3"

    def test_totient(self):
        """phi(12)/12 = 1/3."""
        result = invoke("density", "totient", "12")
        assert "phi(12)/12 = 1/3" in result.output


class TestOddOrderCommand:
    def test_lines(self):
        """One 'k N order' line per modulus."""
        result = invoke("oddorder", "2", "1", "2", "--count", "2")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert "3 7 3" in lines
        assert "5 31 5" in lines

    def test_csv(self):
        """Header k,N,order."""
        lines = data_lines(invoke("oddorder", "2", "1", "2", "--count", "2", "--csv"), "k,N,order")
        assert lines == ["k,N,order", "3,7,3", "5,31,5"]

    def test_search_cap(self, tmp_path):
        """k_max from a settings file stops the search; partial results still print."""
        config = tmp_path / "settings.yaml"
        config.write_text("oddorder_k_max: 5\n")
        result = runner.invoke(app, ["--config", str(config), "oddorder", "2", "1", "2", "--count", "5"])
        assert result.exit_code == 3
        assert "5 31 5" in result.output.splitlines()

    def test_foreign_prime(self):
        """3 does not divide m = 2."""
        assert invoke("oddorder", "3", "1", "2").exit_code == 2


# ============================================================================
# Sweeps, cache and verification
# ============================================================================

class TestSweepAndCache:
    def test_sweep_csv(self):
        """Header plus one row per modulus coprime to m."""
        result = invoke("sweep", "2", "--n-max", "9", "--csv")
        assert result.exit_code == 0
        lines = data_lines(result, "m,N,ord,group_size,diameter,wall_time_ms,tool_version")
        assert [line.split(",")[1] for line in lines[1:]] == ["1", "3", "5", "7", "9"]

    def test_cache_round_trip(self, tmp_path):
        """A sweep writes the cache; replay reproduces it; tampering is caught."""
        cache = tmp_path / "cache.jsonl"
        assert invoke("--cache", str(cache), "sweep", "2", "--n-max", "9").exit_code == 0
        assert len(cache.read_text().splitlines()) == 5

        result = invoke("--cache", str(cache), "cache-replay")
        assert result.exit_code == 0
        assert "replayed 5 record(s), 0 mismatch(es)" in result.output

        record = json.loads(cache.read_text().splitlines()[2])
        assert record["N"] == 5
        record["diameter"] = 4
        with cache.open("a") as f:
            f.write(json.dumps(record) + "\n")
        result = invoke("--cache", str(cache), "cache-replay")
        assert result.exit_code == 1
        assert "1 mismatch(es)" in result.output

    def test_cache_from_environment(self, tmp_path, monkeypatch):
        """BOXSCOPE_CACHE stands in for --cache."""
        cache = tmp_path / "env.jsonl"
        monkeypatch.setenv(CACHE_ENV_VAR, str(cache))
        assert invoke("sweep", "3", "--n-max", "5").exit_code == 0
        assert cache.exists()

    def test_replay_needs_cache(self):
        """No cache path is a validation error."""
        assert invoke("cache-replay").exit_code == 2

    def test_json_is_deterministic(self):
        """Two runs agree once wall_time_ms is dropped."""
        def rows():
            return [
                {k: v for k, v in row.items() if k != "wall_time_ms"}
                for row in json_lines(invoke("sweep", "2", "--n-max", "15", "--json"))
            ]
        assert rows() == rows()


class TestVerifyCommand:
    def test_worked_example(self):
        """Every criterion of the worked example passes."""
        result = invoke("verify", "worked-example")
        assert result.exit_code == 0

    def test_json(self):
        """One JSON object per criterion."""
        rows = json_lines(invoke("verify", "worked-example", "--json"))
        assert len(rows) == 3
        assert all(r["passed"] for r in rows)

    def test_unknown_suite(self):
        """Unknown suite names are a validation error."""
        result = invoke("verify", "bogus")
        assert result.exit_code == 2
        assert "suite must be one of" in result.output
