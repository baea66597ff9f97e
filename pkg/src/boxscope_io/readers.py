"""
Boxscope I/O Readers

YAML and JSON settings files, explicit modulus lists, and the settings
precedence chain (defaults, file, environment, flags).
"""
from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from boxscope_engine.models import BoxscopeSettings
from boxscope_engine.validation import DomainError

CACHE_ENV_VAR = "BOXSCOPE_CACHE"


def parse_settings_dict(data: Optional[dict[str, Any]]) -> BoxscopeSettings:
    """
    Parse a settings mapping into BoxscopeSettings.

    Keys may sit at the top level or under a `settings:` section. Unknown keys
    are rejected so a typo never silently falls back to a default.
    """
    if data is None:
        return BoxscopeSettings()
    if not isinstance(data, dict):
        raise DomainError(f"settings file must hold a mapping, got {type(data).__name__}")
    section = data.get("settings", data)
    unknown = sorted(set(section) - set(BoxscopeSettings.model_fields))
    if unknown:
        raise DomainError(f"unknown settings keys: {', '.join(unknown)}")
    return BoxscopeSettings(**section)


def read_yaml(path: str | Path) -> BoxscopeSettings:
    """Read settings from a YAML file."""
    path = Path(path)
    with open(path, "r") as f:
        data = yaml.safe_load(f)

    return parse_settings_dict(data)


def read_json(path: str | Path) -> BoxscopeSettings:
    """Read settings from a JSON file."""
    path = Path(path)
    with open(path, "r") as f:
        data = json.load(f)

    return parse_settings_dict(data)


def read_settings_file(path: str | Path) -> BoxscopeSettings:
    """
    Read settings from a file (auto-detects format).

    Args:
        path: Path to settings file (YAML or JSON)

    Returns:
        BoxscopeSettings model
    """
    path = Path(path)
    suffix = path.suffix.lower()

    if suffix in (".yaml", ".yml"):
        return read_yaml(path)
    elif suffix == ".json":
        return read_json(path)
    else:
        raise ValueError(f"Unsupported file format: {suffix}")


def resolve_settings(
    config: Optional[Path] = None,
    cache: Optional[Path] = None,
    max_vertices: Optional[int] = None,
    jobs: Optional[int] = None,
    env: Optional[Mapping[str, str]] = None,
) -> BoxscopeSettings:
    """
    Merge settings sources, lowest precedence first: model defaults, the
    settings file, BOXSCOPE_CACHE, then explicit flags.
    """
    env = os.environ if env is None else env
    settings = read_settings_file(config) if config else BoxscopeSettings()

    overrides: dict[str, Any] = {}
    if env.get(CACHE_ENV_VAR):
        overrides["cache_path"] = Path(env[CACHE_ENV_VAR])
    if cache is not None:
        overrides["cache_path"] = cache
    if max_vertices is not None:
        overrides["max_vertices"] = max_vertices
    if jobs is not None:
        overrides["jobs"] = jobs
    if not overrides:
        return settings
    # Re-validate so flag values go through the same field validators.
    return BoxscopeSettings(**{**settings.model_dump(), **overrides})


# ============================================================================
# MODULUS LISTS
# ============================================================================

def _coerce_terms(raw: Any, source: str) -> list[int]:
    if isinstance(raw, dict):
        raw = raw.get("terms")
    if not isinstance(raw, list) or not raw:
        raise DomainError(f"{source}: expected a non-empty list of moduli")
    terms = []
    for i, value in enumerate(raw, start=1):
        if isinstance(value, bool) or not isinstance(value, int):
            raise DomainError(f"{source}: term {i} is not an integer: {value!r}")
        terms.append(value)
    return terms


def parse_terms(text: str) -> list[int]:
    """Parse '3,9,27' or whitespace-separated moduli."""
    tokens = text.replace(",", " ").split()
    try:
        values = [int(tok) for tok in tokens]
    except ValueError as exc:
        raise DomainError(f"terms must be integers, got {text!r}") from exc
    return _coerce_terms(values, "terms")


def read_moduli_file(path: str | Path) -> list[int]:
    """
    Read an explicit modulus chain N_1, N_2, ...

    YAML/JSON files hold a list or a mapping with a `terms` list; any other
    suffix is read as plain text, one or more moduli per line.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    with open(path, "r") as f:
        if suffix in (".yaml", ".yml"):
            return _coerce_terms(yaml.safe_load(f), str(path))
        if suffix == ".json":
            return _coerce_terms(json.load(f), str(path))
        lines = [line.split("#", 1)[0] for line in f]
    return parse_terms(" ".join(lines))
