"""
Boxscope CLI Application

Typer-based command-line interface over the boxscope engine: orders,
congruence quotients, Cayley-graph diameters, box-space scans, prime
densities, odd-order moduli and cached diameter sweeps.
"""
from __future__ import annotations

import logging
import sys
from contextlib import contextmanager
from dataclasses import asdict
from pathlib import Path
from typing import Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from boxscope_engine.cayley import write_dot_file
from boxscope_engine.density import PrimeSet, euler_product_sequence
from boxscope_engine.engine import BoxscopeEngine
from boxscope_engine.group import length_bounds
from boxscope_engine.models import BoxscopeSettings, SequenceKind, format_fraction
from boxscope_engine.sweep import sweep_moduli
from boxscope_engine.validation import (
    DomainError,
    InvariantViolation,
    ResourceCapError,
    SearchExhaustedError,
    UsageError,
)
from boxscope_io.cache import ScanCache
from boxscope_io.readers import parse_terms, read_moduli_file, resolve_settings
from boxscope_io.writers import (
    euler_table,
    export_xlsx,
    odd_order_table,
    row_table,
    scan_records_table,
    write_csv,
    write_distance_csv,
    write_jsonl,
)
from boxscope_ui_cli import display
from boxscope_ui_cli.display import console

EXIT_INTERNAL = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE_CAP = 3

app = typer.Typer(
    name="boxscope",
    help="Exact arithmetic and box-space diagnostics for BS(1,m)",
    add_completion=False,
)
density_app = typer.Typer(help="Partial prime densities, Euler products and order ratios")
app.add_typer(density_app, name="density")

err_console = Console(stderr=True)


@contextmanager
def _exit_codes() -> Iterator[None]:
    """Map engine exceptions to the documented exit codes."""
    try:
        yield
    except InvariantViolation as e:
        err_console.print(f"[red]Internal error: {e}[/red]")
        raise typer.Exit(code=EXIT_INTERNAL)
    except ResourceCapError as e:
        err_console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(code=EXIT_RESOURCE_CAP)
    except (DomainError, ValidationError, ValueError, FileNotFoundError) as e:
        err_console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(code=EXIT_VALIDATION)


def _settings(ctx: typer.Context) -> BoxscopeSettings:
    return ctx.obj["settings"]


def _engine(ctx: typer.Context) -> BoxscopeEngine:
    return BoxscopeEngine(_settings(ctx))


def _check_formats(json_out: bool, csv_out: bool) -> None:
    if json_out and csv_out:
        raise UsageError("--json and --csv are mutually exclusive")


def _prime_set(primes: Optional[str], residue: Optional[str]) -> PrimeSet:
    """--primes '2,3,7' | --residue 'r,q' | all primes."""
    if primes is not None and residue is not None:
        raise UsageError("--primes and --residue are mutually exclusive")
    if primes is not None:
        return PrimeSet.explicit(parse_terms(primes)) if primes.strip() else PrimeSet.empty()
    if residue is not None:
        parts = parse_terms(residue)
        if len(parts) != 2:
            raise UsageError(f"--residue expects 'r,q', got {residue!r}")
        return PrimeSet.residue_class(parts[0], parts[1])
    return PrimeSet.all_primes()


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="Settings file (YAML or JSON)"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="JSONL ScanRecord cache (overrides BOXSCOPE_CACHE)"),
    max_vertices: Optional[int] = typer.Option(None, "--max-vertices", help="Vertex cap for Cayley graph builds"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", help="Worker processes for sweeps"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
) -> None:
    """Exact arithmetic and box-space diagnostics for BS(1,m)."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )
    with _exit_codes():
        settings = resolve_settings(config=config, cache=cache, max_vertices=max_vertices, jobs=jobs)
    ctx.obj = {"settings": settings}


# ============================================================================
# ARITHMETIC AND QUOTIENTS
# ============================================================================

@app.command()
def order(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Multiplicative order of m modulo N and mu with m^ord = mu N + 1."""
    with _exit_codes():
        cert = _engine(ctx).order(m, n)
        if json_out:
            row = {"m": m, "N": n, "ord": cert.order, "mu_mod_N": cert.mu_mod_n}
            if display.mu_printable(cert):
                row["mu"] = cert.mu
            write_jsonl([row], sys.stdout)
        else:
            display.display_order(cert)


@app.command()
def lift(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    k: int = typer.Argument(..., help="Exponent k >= 1"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Compare ord_m(N^k) with ord_m(N) * eta_N(k)."""
    with _exit_codes():
        report = _engine(ctx).lift(m, n, k)
        if json_out:
            row = asdict(report) | {"exact": report.exact, "divides": report.divides}
            write_jsonl([row], sys.stdout)
        else:
            display.display_lift(report)


@app.command()
def quotient(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Congruence quotient Z/N x|_m Z/ord_m(N)."""
    with _exit_codes():
        Q = _engine(ctx).quotient(m, n)
        if json_out:
            write_jsonl([{"m": m, "N": n, "ord": Q.order, "size": Q.size, "structure": str(Q)}], sys.stdout)
        else:
            display.display_quotient(Q)


@app.command()
def diameter(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    distances: Optional[Path] = typer.Option(None, "--distances", help="Write BFS distances from the identity as CSV"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Exact BFS diameter of the quotient Cayley graph and its envelope."""
    with _exit_codes():
        engine = _engine(ctx)
        result = engine.diameter(m, n)
        if distances is not None:
            write_distance_csv(engine.graph(m, n), distances)
        if json_out:
            write_jsonl([asdict(result) | {"within_bounds": result.within_bounds}], sys.stdout)
        else:
            display.display_diameter(result)
            if distances is not None:
                console.print(f"[green]✓ Distances written to {distances}[/green]")


@app.command("export-dot")
def export_dot(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    path: Path = typer.Argument(..., help="Output DOT file"),
) -> None:
    """Write the quotient Cayley graph as a DOT digraph."""
    with _exit_codes():
        G = _engine(ctx).graph(m, n)
        write_dot_file(G, path)
        console.print(f"[green]✓ Exported {G.vertex_count} vertices, {G.edge_count} edges to {path}[/green]")


@app.command("normal-form")
def normal_form(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    word: str = typer.Argument(..., help="Word over a, A (a^-1), t, T (t^-1)"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Normal form t^-i a^ell t^j of a word, and a short word for it."""
    with _exit_codes():
        nf, synthesized = _engine(ctx).normal_form(m, word)
        bounds = length_bounds(nf, m)
        if json_out:
            write_jsonl(
                [{
                    "i": nf.i,
                    "ell": nf.ell,
                    "j": nf.j,
                    "word": str(synthesized),
                    "length": len(synthesized),
                    "upper_bound": bounds[1],
                }],
                sys.stdout,
            )
        else:
            display.display_normal_form(nf, synthesized, bounds)


# ============================================================================
# BOX SPACES
# ============================================================================

@app.command()
def scan(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    family: SequenceKind = typer.Argument(..., help="Modulus family"),
    alpha: str = typer.Option(..., "--alpha", help="Exponent alpha in (0, 1), e.g. 0.5 or 1/2"),
    k_max: int = typer.Option(..., "--kmax", help="Number of terms"),
    diameters: bool = typer.Option(False, "--diameters", help="Also compute BFS diameters under the vertex cap"),
    terms: Optional[str] = typer.Option(None, "--terms", help="Explicit moduli, e.g. '3,9,27'"),
    terms_file: Optional[Path] = typer.Option(None, "--terms-file", help="Explicit moduli from a file"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
    csv_out: bool = typer.Option(False, "--csv", help="Emit CSV"),
    xlsx: Optional[Path] = typer.Option(None, "--xlsx", help="Also write an Excel workbook"),
) -> None:
    """D_alpha trend table over the first k_max terms of a modulus chain."""
    with _exit_codes():
        _check_formats(json_out, csv_out)
        if terms is not None and terms_file is not None:
            raise UsageError("--terms and --terms-file are mutually exclusive")
        explicit = parse_terms(terms) if terms is not None else None
        if terms_file is not None:
            explicit = read_moduli_file(terms_file)

        report = _engine(ctx).scan(m, family, alpha, k_max, with_diameters=diameters, terms=explicit)

        if json_out:
            write_jsonl(report.rows, sys.stdout)
        elif csv_out:
            write_csv(row_table(report), sys.stdout)
        else:
            display.display_dalpha(report)
        if xlsx is not None:
            export_xlsx(report, xlsx)
            err_console.print(f"[green]✓ Exported to {xlsx}[/green]")


@app.command()
def covering(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n: int = typer.Argument(..., metavar="N", help="Modulus coprime to m"),
    d: int = typer.Argument(..., metavar="D", help="Exponent D >= 1"),
    alpha: Optional[float] = typer.Option(None, "--alpha", help="Check |G/M|^alpha <= n"),
    verify: bool = typer.Option(False, "--verify", help="Run the homomorphism, kernel and diameter checks"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Parameters of the covering quotient G/M with n = ord_m(N) N^D."""
    with _exit_codes():
        engine = _engine(ctx)
        if verify:
            report = engine.verify_covering(m, n, d)
            if json_out:
                row = asdict(report)
                row["params"]["alpha"] = None if report.params.alpha is None else format_fraction(report.params.alpha)
                write_jsonl([row | {"passed": report.passed}], sys.stdout)
            else:
                display.display_covering_report(report)
            if not report.passed:
                raise typer.Exit(code=EXIT_INTERNAL)
            return

        params = engine.covering(m, n, d, alpha)
        if json_out:
            row = asdict(params)
            row["alpha"] = None if params.alpha is None else format_fraction(params.alpha)
            write_jsonl([row], sys.stdout)
        else:
            display.display_covering(params)


@app.command()
def sweep(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    n_max: int = typer.Option(..., "--n-max", help="Largest modulus"),
    n_min: int = typer.Option(1, "--n-min", help="Smallest modulus"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
    csv_out: bool = typer.Option(False, "--csv", help="Emit CSV"),
) -> None:
    """Diameter sweep over every N in [n_min, n_max] coprime to m."""
    with _exit_codes():
        _check_formats(json_out, csv_out)
        settings = _settings(ctx)
        cache = ScanCache(settings.cache_path) if settings.cache_path else None
        engine = BoxscopeEngine(settings)

        total = len(sweep_moduli(m, n_max, n_min))
        progress = Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=err_console,
            transient=True,
        )
        with progress:
            task = progress.add_task(f"m = {m}", total=total)
            records = engine.sweep(
                m, n_max, n_min, cache=cache, on_result=lambda record: progress.advance(task)
            )

        if json_out:
            write_jsonl(records, sys.stdout)
        elif csv_out:
            write_csv(scan_records_table(records), sys.stdout)
        else:
            display.display_scan_records(records)


@app.command("cache-replay")
def cache_replay(
    ctx: typer.Context,
    m: Optional[int] = typer.Option(None, "--m", help="Only replay records for this base"),
) -> None:
    """Recompute cached ScanRecords and report mismatches."""
    with _exit_codes():
        settings = _settings(ctx)
        if settings.cache_path is None:
            raise UsageError("a cache path is required (--cache or BOXSCOPE_CACHE)")
        cache = ScanCache(settings.cache_path)
        results = BoxscopeEngine(settings).replay(cache.records(m))
        display.display_replay(results)
        if any(not r.matches for r in results):
            raise typer.Exit(code=EXIT_INTERNAL)


# ============================================================================
# DENSITIES AND ODD ORDERS
# ============================================================================

PRIMES_HELP = "Explicit prime list, e.g. '2,3,7' (empty string for the empty set)"
RESIDUE_HELP = "Primes p = r (mod q), given as 'r,q'"


@density_app.command("natural")
def density_natural(
    ctx: typer.Context,
    x: int = typer.Argument(..., help="Range bound x >= 2"),
    primes: Optional[str] = typer.Option(None, "--primes", help=PRIMES_HELP),
    residue: Optional[str] = typer.Option(None, "--residue", help=RESIDUE_HELP),
) -> None:
    """|{p <= x in P}| / pi(x), exactly."""
    with _exit_codes():
        P = _prime_set(primes, residue)
        value = _engine(ctx).natural_density(P, x)
        console.print(f"d(P, {x}) = {format_fraction(value)} ~ {float(value):.12g}  (P = {P})", soft_wrap=True)


@density_app.command("analytic")
def density_analytic(
    ctx: typer.Context,
    s: float = typer.Option(..., "--s", help="Exponent s > 1"),
    cutoff: int = typer.Option(..., "--cutoff", help="Largest prime included"),
    primes: Optional[str] = typer.Option(None, "--primes", help=PRIMES_HELP),
    residue: Optional[str] = typer.Option(None, "--residue", help=RESIDUE_HELP),
) -> None:
    """Partial Dirichlet-type density at fixed s and cutoff."""
    with _exit_codes():
        P = _prime_set(primes, residue)
        value = _engine(ctx).analytic_density(P, s, cutoff)
        console.print(f"D(P, s={s:g}, cutoff={cutoff}) = {value:.12g}  (P = {P})", soft_wrap=True)


@density_app.command("euler")
def density_euler(
    ctx: typer.Context,
    count: int = typer.Argument(..., help="Number of primes of P"),
    primes: Optional[str] = typer.Option(None, "--primes", help=PRIMES_HELP),
    residue: Optional[str] = typer.Option(None, "--residue", help=RESIDUE_HELP),
    csv_out: bool = typer.Option(False, "--csv", help="Emit every partial product as CSV"),
) -> None:
    """Partial Euler product prod (1 - 1/p) over the first primes of P."""
    with _exit_codes():
        P = _prime_set(primes, residue)
        product = _engine(ctx).euler_product(P, count)
        if csv_out:
            write_csv(euler_table(euler_product_sequence(P, count)), sys.stdout)
        else:
            display.display_euler(product)


@density_app.command("ratio-scan")
def density_ratio_scan(
    ctx: typer.Context,
    m: int = typer.Argument(..., help="Base m >= 2"),
    primes: str = typer.Option(..., "--primes", help="Prime list P, none dividing m"),
    bound: int = typer.Option(..., "--bound", help="Largest modulus scanned"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
    csv_out: bool = typer.Option(False, "--csv", help="Emit CSV"),
    xlsx: Optional[Path] = typer.Option(None, "--xlsx", help="Also write an Excel workbook"),
) -> None:
    """Exact ord_m(N)/N over P-smooth N <= bound and its minimum."""
    with _exit_codes():
        _check_formats(json_out, csv_out)
        result = _engine(ctx).ratio_scan(m, parse_terms(primes), bound)
        if json_out:
            write_jsonl(result.rows, sys.stdout)
        elif csv_out:
            write_csv(row_table(result), sys.stdout)
        else:
            display.display_ratio_scan(result)
        if xlsx is not None:
            export_xlsx(result, xlsx)
            err_console.print(f"[green]✓ Exported to {xlsx}[/green]")


@density_app.command("totient")
def density_totient(
    ctx: typer.Context,
    n: int = typer.Argument(..., metavar="N", help="Modulus N >= 1"),
) -> None:
    """phi(N)/N, the envelope of ord_m(N)/N."""
    with _exit_codes():
        value = _engine(ctx).totient_bound(n)
        console.print(f"phi({n})/{n} = {format_fraction(value)} ~ {float(value):.12g}", soft_wrap=True)


@app.command()
def oddorder(
    ctx: typer.Context,
    a1: int = typer.Argument(..., help="Numerator of s = a1/a2"),
    a2: int = typer.Argument(..., help="Denominator of s = a1/a2"),
    m: int = typer.Argument(..., help="Base m >= 2; every prime of a1 a2 divides m"),
    count: int = typer.Option(5, "--count", help="Number of moduli"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
    csv_out: bool = typer.Option(False, "--csv", help="Emit CSV"),
) -> None:
    """Moduli N in which s = a1/a2 has odd multiplicative order (lines: k N order)."""
    with _exit_codes():
        _check_formats(json_out, csv_out)
        try:
            moduli = _engine(ctx).odd_order(a1, a2, m, count)
        except SearchExhaustedError as e:
            _emit_odd_order(e.partial, json_out, csv_out)
            raise
        _emit_odd_order(moduli, json_out, csv_out)


def _emit_odd_order(moduli: list, json_out: bool, csv_out: bool) -> None:
    if json_out:
        write_jsonl([asdict(mod) for mod in moduli], sys.stdout)
    elif csv_out:
        write_csv(odd_order_table(moduli), sys.stdout)
    else:
        display.display_odd_order(moduli)


# ============================================================================
# VERIFICATION
# ============================================================================

@app.command()
def verify(
    ctx: typer.Context,
    suite: str = typer.Argument("all", help="Suite name, or 'all'"),
    json_out: bool = typer.Option(False, "--json", help="Emit JSON lines"),
) -> None:
    """Run a named verification suite and report pass/fail per criterion."""
    with _exit_codes():
        results = _engine(ctx).verify(suite)
        if json_out:
            write_jsonl(results, sys.stdout)
        else:
            display.display_criteria(results)
        if not all(r.passed for r in results):
            raise typer.Exit(code=EXIT_INTERNAL)


if __name__ == "__main__":
    app()
