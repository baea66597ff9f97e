"""
Boxscope I/O Writers

Export report rows to CSV, JSON lines and XLSX, plus BFS distance dumps.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, TextIO

import pandas as pd
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter
from openpyxl.utils.dataframe import dataframe_to_rows
from pydantic import BaseModel

from boxscope_engine.cayley import CayleyGraph, distance_rows
from boxscope_engine.density import RatioScan
from boxscope_engine.models import DalphaReport, DalphaRow, ScanRecord, format_fraction
from boxscope_engine.oddorder import OddOrderModulus

CSV_FLOAT_FORMAT = "%.12g"
# Integers beyond this lose digits as Excel doubles and are written as text.
XLSX_EXACT_INT_LIMIT = 2**53


# ============================================================================
# TABLES
# ============================================================================

def _create_dalpha_table(report: DalphaReport) -> pd.DataFrame:
    """One row per k; columns are the DalphaRow fields."""
    columns = list(DalphaRow.model_fields)
    df = pd.DataFrame([row.model_dump() for row in report.rows], columns=columns)
    df["diameter"] = df["diameter"].astype("Int64")
    return df


def _create_dalpha_summary(report: DalphaReport) -> pd.DataFrame:
    data = [
        ["m", report.m],
        ["family", report.kind.value],
        ["alpha", report.alpha],
        ["terms", len(report.rows)],
        ["coherence violations", ", ".join(map(str, report.coherence_violations())) or "none"],
    ]
    return pd.DataFrame(data, columns=["Parameter", "Value"])


def _create_ratio_table(scan: RatioScan) -> pd.DataFrame:
    rows = []
    for r in scan.rows:
        rows.append({
            "N": r.N,
            "ord": r.ord,
            "ratio": format_fraction(r.ratio),
            "ratio_decimal": r.ratio_decimal,
        })
    return pd.DataFrame(rows, columns=["N", "ord", "ratio", "ratio_decimal"])


def _create_ratio_summary(scan: RatioScan) -> pd.DataFrame:
    data = [
        ["m", scan.m],
        ["P", ", ".join(map(str, scan.primes)) or "(empty)"],
        ["bound", scan.bound],
        ["moduli scanned", len(scan.rows)],
        ["min ratio", format_fraction(scan.min_ratio)],
        ["argmin N", scan.argmin_N],
    ]
    return pd.DataFrame(data, columns=["Parameter", "Value"])


def scan_records_table(records: Iterable[ScanRecord]) -> pd.DataFrame:
    """ScanRecords with the cache field names as columns."""
    columns = list(ScanRecord.model_fields)
    df = pd.DataFrame([r.model_dump() for r in records], columns=columns)
    df["diameter"] = df["diameter"].astype("Int64")
    return df


def odd_order_table(moduli: Iterable[OddOrderModulus]) -> pd.DataFrame:
    rows = [{"k": mod.k, "N": mod.N, "order": mod.order} for mod in moduli]
    df = pd.DataFrame(rows, columns=["k", "N", "order"])
    df["k"] = df["k"].astype("Int64")
    return df


def euler_table(values: list[Fraction]) -> pd.DataFrame:
    """Partial Euler products after 1, 2, ... primes."""
    return pd.DataFrame(
        {
            "count": range(1, len(values) + 1),
            "product": [format_fraction(v) for v in values],
            "decimal": [float(v) for v in values],
        },
        columns=["count", "product", "decimal"],
    )


def distance_table(G: CayleyGraph, source: int = 0) -> pd.DataFrame:
    """BFS distance from source for every vertex of G."""
    return pd.DataFrame(distance_rows(G, source), columns=["vertex_index", "x", "k", "distance"])


def format_tables(result: DalphaReport | RatioScan) -> dict[str, pd.DataFrame]:
    """
    Convert a report to display-ready DataFrames.

    Returns:
        Dict mapping table name to DataFrame
    """
    if isinstance(result, DalphaReport):
        return {
            "1_Summary": _create_dalpha_summary(result),
            "2_Dalpha_Rows": _create_dalpha_table(result),
        }
    if isinstance(result, RatioScan):
        return {
            "1_Summary": _create_ratio_summary(result),
            "2_Ratio_Scan": _create_ratio_table(result),
        }
    raise TypeError(f"no table layout for {type(result).__name__}")


def row_table(result: DalphaReport | RatioScan) -> pd.DataFrame:
    """The per-row table of a report, as emitted by --csv."""
    if isinstance(result, DalphaReport):
        return _create_dalpha_table(result)
    return _create_ratio_table(result)


# ============================================================================
# CSV / JSON LINES
# ============================================================================

def write_csv(df: pd.DataFrame, sink: TextIO) -> None:
    """Header row, comma separator, LF endings, 12 significant digits, empty missing values."""
    df.to_csv(sink, index=False, lineterminator="\n", float_format=CSV_FLOAT_FORMAT, na_rep="")


def _json_ready(item: BaseModel | dict[str, Any]) -> dict[str, Any]:
    if isinstance(item, BaseModel):
        return item.model_dump(mode="json")
    return item


def write_jsonl(items: Iterable[BaseModel | dict[str, Any]], sink: TextIO) -> int:
    """One JSON object per line; returns the number of lines written."""
    count = 0
    for item in items:
        sink.write(json.dumps(_json_ready(item), ensure_ascii=False) + "\n")
        count += 1
    return count


def export_csv(result: DalphaReport | RatioScan, output_dir: str | Path) -> list[Path]:
    """
    Export a report to CSV files (one per table).

    Returns:
        List of created file paths
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)

    tables = format_tables(result)
    created_files = []

    for table_name, df in tables.items():
        file_path = output_dir / f"{table_name}.csv"
        with file_path.open("w", encoding="utf-8", newline="") as fh:
            write_csv(df, fh)
        created_files.append(file_path)

    return created_files


def write_distance_csv(G: CayleyGraph, path: str | Path, source: int = 0) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        write_csv(distance_table(G, source), fh)
    return path


# ============================================================================
# XLSX
# ============================================================================

def _style_table_header(ws, header_row: int, max_col: int) -> None:
    header_font = Font(bold=True, color="FFFFFF")
    header_fill = PatternFill(start_color="2E75B6", end_color="2E75B6", fill_type="solid")
    thin_border = Border(
        left=Side(style="thin"),
        right=Side(style="thin"),
        top=Side(style="thin"),
        bottom=Side(style="thin"),
    )
    for col in range(1, max_col + 1):
        cell = ws.cell(row=header_row, column=col)
        cell.font = header_font
        cell.fill = header_fill
        cell.border = thin_border
        cell.alignment = Alignment(horizontal="center")


def _auto_fit_columns(ws, max_col: int) -> None:
    for col in range(1, max_col + 1):
        max_length = 0
        for row in ws.iter_rows(min_col=col, max_col=col, max_row=ws.max_row):
            cell = row[0]
            if cell.value is not None and len(str(cell.value)) > max_length:
                max_length = len(str(cell.value))
        ws.column_dimensions[get_column_letter(col)].width = min(max_length + 2, 40)


def _xlsx_value(value: Any) -> Any:
    if value is pd.NA or (isinstance(value, float) and value != value):
        return None
    if pd.api.types.is_integer(value) and abs(int(value)) >= XLSX_EXACT_INT_LIMIT:
        return str(int(value))
    return value


def export_xlsx(result: DalphaReport | RatioScan, path: str | Path) -> Path:
    """
    Export a report to an Excel workbook, one sheet per table.

    Args:
        result: report to export
        path: Output file path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    wb = Workbook()
    wb.remove(wb.active)
    for sheet_name, df in format_tables(result).items():
        ws = wb.create_sheet(title=sheet_name[:31])
        for r in dataframe_to_rows(df, index=False, header=True):
            ws.append([_xlsx_value(v) for v in r])
        _style_table_header(ws, 1, len(df.columns))
        _auto_fit_columns(ws, len(df.columns))
    wb.save(path)
    return path
