"""
Boxscope I/O Scan Cache

Append-only JSON-lines store of ScanRecords keyed by (m, N). Only the
process that owns the ScanCache writes to it; sweep workers hand their
records back to that process.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterator, Optional

from pydantic import ValidationError

from boxscope_engine.models import ScanRecord

logger = logging.getLogger(__name__)


class ScanCache:
    """
    JSONL ScanRecord cache.

    Later lines win over earlier ones for the same (m, N), so a record that
    gains a diameter on a rerun shadows the older one without rewriting the
    file. Corrupt lines are skipped and counted.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.corrupt_lines = 0
        self._records: dict[tuple[int, int], ScanRecord] = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        with self.path.open("rb") as fh:
            for lineno, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                try:
                    record = ScanRecord.model_validate(json.loads(raw.decode("utf-8")))
                except (UnicodeDecodeError, json.JSONDecodeError, ValidationError) as exc:
                    self.corrupt_lines += 1
                    logger.debug("cache %s line %d skipped: %s", self.path, lineno, exc)
                    continue
                self._records[record.key] = record
        if self.corrupt_lines:
            logger.warning("cache %s: skipped %d corrupt line(s)", self.path, self.corrupt_lines)
        logger.debug("cache %s: loaded %d record(s)", self.path, len(self._records))

    def get(self, m: int, N: int) -> Optional[ScanRecord]:
        return self._records.get((m, N))

    def append(self, record: ScanRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8", newline="\n") as fh:
            fh.write(record.model_dump_json() + "\n")
        self._records[record.key] = record

    def records(self, m: Optional[int] = None) -> list[ScanRecord]:
        """Current records sorted by (m, N), optionally for one m."""
        return sorted(
            (r for r in self._records.values() if m is None or r.m == m),
            key=lambda r: r.key,
        )

    def __iter__(self) -> Iterator[ScanRecord]:
        return iter(self.records())

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self._records
