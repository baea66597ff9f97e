"""
Boxscope Engine Validation

Exception hierarchy and fail-fast precondition checks with precise error messages.
"""
from __future__ import annotations

from math import gcd
from typing import Any, Optional


class BoxscopeError(Exception):
    """Base class for every error raised by the engine."""
    pass


class DomainError(BoxscopeError, ValueError):
    """Raised when an argument violates an operation's precondition."""
    pass


class UsageError(DomainError):
    """Raised when an operation is called with a malformed argument list."""
    pass


class ChainValidationError(DomainError):
    """Raised when an explicit modulus list breaks divisibility or coprimality."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class ResourceCapError(BoxscopeError):
    """Raised when a computation would exceed a configured resource cap."""

    def __init__(self, message: str, required: int, cap: int):
        super().__init__(message)
        self.required = required
        self.cap = cap


class SearchExhaustedError(ResourceCapError):
    """Raised when a bounded search stops before finding everything asked for."""

    def __init__(self, message: str, required: int, cap: int, partial: Optional[list[Any]] = None):
        super().__init__(message, required, cap)
        self.partial = partial or []


class InvariantViolation(BoxscopeError, AssertionError):
    """Raised when an internal invariant fails (signals a bug, not bad input)."""
    pass


def require_positive(name: str, value: int) -> None:
    """Require value >= 1."""
    if value < 1:
        raise DomainError(f"{name} >= 1 required, got {name} = {value}")


def require_at_least(name: str, value: int, bound: int) -> None:
    """Require value >= bound."""
    if value < bound:
        raise DomainError(f"{name} >= {bound} required, got {name} = {value}")


def require_coprime(m: int, n: int, m_name: str = "m", n_name: str = "N") -> None:
    """Require gcd(m, n) = 1."""
    g = gcd(m, n)
    if g != 1:
        raise DomainError(
            f"gcd({m_name}, {n_name}) = 1 required, got gcd({m}, {n}) = {g}"
        )


def require_base(m: int) -> None:
    """Require a valid Baumslag-Solitar parameter m >= 2."""
    require_at_least("m", m, 2)


def require_open_unit_interval(name: str, value: Any) -> None:
    """Require 0 < value < 1."""
    if not 0 < value < 1:
        raise DomainError(f"0 < {name} < 1 required, got {name} = {value}")
