"""
Boxscope Engine Data Models

Pydantic models for settings, cached scan records and report rows.
"""
from __future__ import annotations

import math
import os
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Optional

import mpmath
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

TOOL_VERSION = "1.0.0"
DEFAULT_MAX_VERTICES = 5_000_000
DEFAULT_ORACLE_CAP = 10**7
DEFAULT_ODDORDER_K_MAX = 10**4


class SequenceKind(str, Enum):
    """Families of nested moduli N_1 | N_2 | ..."""
    GEOMETRIC = "geometric"                    # (m^2 - 1)^k
    DOUBLY_EXPONENTIAL = "doubly_exponential"  # m^(2^k) - 1
    EXPLICIT = "explicit"


def format_real(value: Optional[float | mpmath.mpf], digits: int = 12) -> str:
    """Render a real with a fixed number of significant digits."""
    if value is None:
        return ""
    if isinstance(value, mpmath.mpf):
        return mpmath.nstr(value, digits)
    return f"{value:.{digits}g}"


def format_fraction(value: Fraction) -> str:
    """Render an exact rational as 'p/q' (or 'p' when integral)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def diameter_constant(m: int) -> float:
    """C_m = 2m(2 + ln m), the upper-bound constant for quotient diameters."""
    return 2 * m * (2 + math.log(m))


# ============================================================================
# SETTINGS
# ============================================================================

class BoxscopeSettings(BaseModel):
    """Tunables shared by the engine and the CLI."""
    max_vertices: int = Field(DEFAULT_MAX_VERTICES, description="Vertex cap for every Cayley graph build")
    jobs: int = Field(default_factory=lambda: os.cpu_count() or 1, description="Worker processes for sweeps")
    cache_path: Optional[Path] = Field(None, description="Append-only JSONL cache of ScanRecords")
    oracle_cap: int = Field(DEFAULT_ORACLE_CAP, description="Iteration cap of the brute-force order oracle")
    oddorder_k_max: int = Field(DEFAULT_ODDORDER_K_MAX, description="Largest exponent tried by the odd-order search")
    precision_bits: int = Field(96, description="mpmath working precision for real-valued ratios")
    samples: int = Field(10_000, description="Random samples drawn by verification suites")
    seed: int = Field(20240607, description="Seed for every random sample")

    @field_validator("max_vertices", "jobs", "oracle_cap", "oddorder_k_max", "samples")
    @classmethod
    def validate_positive(cls, v: int, info) -> int:
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {v}")
        return v

    @field_validator("precision_bits")
    @classmethod
    def validate_precision(cls, v: int) -> int:
        if v < 64:
            raise ValueError(f"precision_bits must be >= 64, got {v}")
        return v


# ============================================================================
# OUTPUT MODELS
# ============================================================================

class ScanRecord(BaseModel):
    """One cached measurement of a congruence quotient."""
    m: int
    N: int
    ord: int
    group_size: int
    diameter: Optional[int] = None
    wall_time_ms: float
    tool_version: str = TOOL_VERSION

    @model_validator(mode="after")
    def validate_measurement(self) -> ScanRecord:
        if self.m < 2 or self.N < 1 or self.ord < 1:
            raise ValueError(f"m >= 2, N >= 1 and ord >= 1 required, got m = {self.m}, N = {self.N}, ord = {self.ord}")
        if self.group_size != self.N * self.ord:
            raise ValueError(
                f"group_size = N * ord required, got {self.group_size} != {self.N} * {self.ord}"
            )
        if self.diameter is not None and self.diameter < 0:
            raise ValueError(f"diameter >= 0 required, got {self.diameter}")
        return self

    @property
    def key(self) -> tuple[int, int]:
        return (self.m, self.N)


class DalphaRow(BaseModel):
    """One term of a D_alpha trend table. ratio_order is an mpf and may lie far below the float range."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int
    N_k: int
    ord: int
    group_size: int
    ratio_order: mpmath.mpf
    diameter: Optional[int] = None
    ratio_diam: Optional[float] = None
    alpha_hat: Optional[float] = None

    @field_serializer("ratio_order")
    def serialize_ratio_order(self, value: mpmath.mpf) -> str:
        return format_real(value)


class DalphaReport(BaseModel):
    """Finite-prefix table behind the D_alpha characterization."""
    m: int
    kind: SequenceKind
    alpha: float
    rows: list[DalphaRow]

    def coherence_violations(self) -> list[int]:
        """
        Return the k's whose ratio_diam leaves the envelope implied by the
        diameter bounds: [ord/3, C_m * ord] / |G|^alpha.
        """
        c_m = diameter_constant(self.m)
        bad = []
        for row in self.rows:
            if row.ratio_diam is None or row.group_size <= 1:
                continue
            scale = math.exp(self.alpha * math.log(row.group_size))
            low = row.ord / 3 / scale
            high = c_m * row.ord / scale
            if not (low * (1 - 1e-12) <= row.ratio_diam <= high * (1 + 1e-12)):
                bad.append(row.k)
        return bad


class RatioRow(BaseModel):
    """ord_m(N)/N for one P-smooth modulus."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    N: int
    ord: int
    ratio: Fraction
    ratio_decimal: float

    @field_serializer("ratio")
    def serialize_ratio(self, value: Fraction) -> str:
        return format_fraction(value)


class CriterionResult(BaseModel):
    """Outcome of one acceptance criterion."""
    name: str
    passed: bool
    detail: str
    elapsed_ms: float = 0.0
