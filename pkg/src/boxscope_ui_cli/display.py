"""
Boxscope CLI Display

Rich table formatting for terminal output.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from boxscope_engine.arith import LiftReport, OrderCertificate
from boxscope_engine.boxspace import CoveringParams, CoveringReport
from boxscope_engine.density import EulerProduct, RatioScan
from boxscope_engine.engine import DiameterResult, ReplayResult
from boxscope_engine.group import NormalForm, Word
from boxscope_engine.models import CriterionResult, DalphaReport, ScanRecord, format_fraction, format_real
from boxscope_engine.oddorder import OddOrderModulus
from boxscope_engine.quotient import QuotientGroup

console = Console()

# mu is printed in full only below this many digits; otherwise mu mod N.
MU_DIGITS_LIMIT = 60


def display_header(title: str) -> None:
    """Display a section header."""
    console.print()
    console.print(Panel(Text(title, style="bold white"), style="blue"))


def mu_printable(cert: OrderCertificate) -> bool:
    return cert.order * math.log10(cert.m) <= MU_DIGITS_LIMIT


def order_line(cert: OrderCertificate) -> str:
    if mu_printable(cert):
        mu_text = str(cert.mu)
    else:
        mu_text = f"{cert.mu_mod_n} (mod {cert.N})"
    return f"ord_{cert.m}({cert.N}) = {cert.order}, mu = {mu_text}"


def display_order(cert: OrderCertificate) -> None:
    console.print(order_line(cert), soft_wrap=True)


def display_lift(report: LiftReport) -> None:
    verdict = "exact" if report.exact else ("multiple" if report.divides else "MISMATCH")
    console.print(
        f"ord_{report.m}({report.N}^{report.k}) = {report.actual}, "
        f"ord * eta = {report.predicted} ({verdict})"
    )


def display_quotient(Q: QuotientGroup) -> None:
    console.print(f"G_{Q.m} / G_{Q.m}({Q.N}) = {Q}, |G| = {Q.size}")


def diameter_line(result: DiameterResult) -> str:
    return f"diameter = {result.diameter}, |G| = {result.size}, bounds [{result.lower:.2f}, {result.upper:.2f}]"


def display_diameter(result: DiameterResult) -> None:
    console.print(diameter_line(result), soft_wrap=True)
    if not result.within_bounds:
        console.print("[yellow]diameter lies outside the envelope ord/3 .. C_m ord[/yellow]")


def display_normal_form(nf: NormalForm, word: Word, bounds: tuple[Optional[float], float]) -> None:
    lower, upper = bounds
    console.print(f"normal form: {nf}")
    console.print(f"synthesized word ({len(word)} letters): {word or '(empty)'}", soft_wrap=True)
    console.print(f"length bounds: [{format_real(lower) or '-'}, {format_real(upper)}]")


def display_dalpha(report: DalphaReport) -> None:
    display_header(f"D_alpha scan: m = {report.m}, {report.kind.value}, alpha = {format_real(report.alpha)}")

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("k", justify="center")
    table.add_column("N_k", justify="right")
    table.add_column("ord", justify="right")
    table.add_column("|G|", justify="right")
    table.add_column("ord/N^alpha", justify="right")
    table.add_column("diameter", justify="right")
    table.add_column("diam/|G|^alpha", justify="right")
    table.add_column("alpha_hat", justify="right")

    for row in report.rows:
        table.add_row(
            str(row.k),
            str(row.N_k),
            str(row.ord),
            str(row.group_size),
            format_real(row.ratio_order),
            "" if row.diameter is None else str(row.diameter),
            format_real(row.ratio_diam),
            format_real(row.alpha_hat),
        )

    console.print(table)
    violations = report.coherence_violations()
    if violations:
        console.print(f"[yellow]rows leaving the diameter envelope: k = {', '.join(map(str, violations))}[/yellow]")


def display_covering(params: CoveringParams) -> None:
    console.print(f"n = {params.n}, |G/M| = {params.quotient_size}")
    if params.alpha is not None:
        console.print(f"|G/M|^alpha <= n with alpha = {format_fraction(params.alpha)}: {params.inequality_holds}")


def display_covering_report(report: CoveringReport) -> None:
    display_header(f"Covering quotient m = {report.params.m}, N = {report.params.N}, D = {report.params.D}")

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Check", style="dim")
    table.add_column("Result", justify="right")

    table.add_row("n", str(report.params.n))
    table.add_row("|G/M|", str(report.params.quotient_size))
    table.add_row(
        "homomorphism",
        f"{_mark(report.homomorphism_ok)} ({report.pairs_checked} pairs, {'exhaustive' if report.exhaustive else 'sampled'})",
    )
    table.add_row("kernel size", f"{_mark(report.kernel_ok)} ({report.kernel_size})")
    table.add_row("cyclic image", _mark(report.cyclic_image_ok))
    if report.diameter_skipped:
        table.add_row("diameter >= n/3", "skipped")
    else:
        table.add_row("diameter >= n/3", f"{_mark(bool(report.diameter_ok))} ({report.diameter})")

    console.print(table)
    for note in report.notes:
        console.print(f"[dim]{note}[/dim]")


def display_ratio_scan(scan: RatioScan) -> None:
    display_header(f"ord_{scan.m}(N)/N over P-smooth N <= {scan.bound}")

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("N", justify="right")
    table.add_column("ord", justify="right")
    table.add_column("ratio", justify="right")
    table.add_column("decimal", justify="right")

    for row in scan.rows:
        table.add_row(str(row.N), str(row.ord), format_fraction(row.ratio), format_real(row.ratio_decimal))

    console.print(table)
    console.print(f"min ratio = {format_fraction(scan.min_ratio)} at N = {scan.argmin_N}")


def display_euler(product: EulerProduct) -> None:
    console.print(f"prod (1 - 1/p) over {product.used} primes = {format_real(float(product.value))}")
    if product.truncated:
        console.print(f"[yellow]only {product.used} of {product.requested} primes available[/yellow]")


def odd_order_line(mod: OddOrderModulus) -> str:
    return f"{'-' if mod.k is None else mod.k} {mod.N} {mod.order}"


def display_odd_order(moduli: Sequence[OddOrderModulus]) -> None:
    for mod in moduli:
        console.print(odd_order_line(mod), soft_wrap=True)


def display_scan_records(records: Sequence[ScanRecord]) -> None:
    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("m", justify="center")
    table.add_column("N", justify="right")
    table.add_column("ord", justify="right")
    table.add_column("|G|", justify="right")
    table.add_column("diameter", justify="right")
    table.add_column("ms", justify="right")

    for r in records:
        table.add_row(
            str(r.m),
            str(r.N),
            str(r.ord),
            str(r.group_size),
            "" if r.diameter is None else str(r.diameter),
            f"{r.wall_time_ms:.1f}",
        )

    console.print(table)


def display_replay(results: Sequence[ReplayResult]) -> None:
    mismatches = [r for r in results if not r.matches]
    for r in mismatches:
        console.print(
            f"[red]mismatch (m, N) = ({r.cached.m}, {r.cached.N}): cached ord {r.cached.ord} "
            f"diameter {r.cached.diameter}, fresh ord {r.fresh.ord} diameter {r.fresh.diameter}[/red]"
        )
    console.print(f"replayed {len(results)} record(s), {len(mismatches)} mismatch(es)")


def display_criteria(results: Sequence[CriterionResult]) -> None:
    display_header("Verification")

    table = Table(show_header=True, header_style="bold cyan")
    table.add_column("Criterion", style="dim")
    table.add_column("Result", justify="center")
    table.add_column("Detail")
    table.add_column("ms", justify="right")

    for r in results:
        table.add_row(r.name, _mark(r.passed), r.detail, f"{r.elapsed_ms:.1f}")

    console.print(table)


def _mark(ok: bool) -> str:
    return "[green]✓[/green]" if ok else "[red]✗[/red]"
