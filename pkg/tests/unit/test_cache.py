"""
Unit Tests for the Boxscope Scan Cache

JSONL persistence of ScanRecords, shadowing of older lines and tolerance
of corrupt lines.
"""
import logging

import pytest
from pydantic import ValidationError

from boxscope_engine.models import TOOL_VERSION, ScanRecord
from boxscope_engine.sweep import sweep_diameters
from boxscope_io.cache import ScanCache


@pytest.fixture
def record():
    return ScanRecord(m=2, N=5, ord=4, group_size=20, diameter=3, wall_time_ms=0.5)


class TestScanCache:
    def test_missing_file_is_empty(self, tmp_path):
        """A cache path that does not exist yet loads as empty."""
        cache = ScanCache(tmp_path / "cache.jsonl")
        assert len(cache) == 0
        assert cache.get(2, 5) is None

    def test_append_and_reload(self, tmp_path, record):
        """Records survive a reload."""
        path = tmp_path / "sub" / "cache.jsonl"
        ScanCache(path).append(record)
        reloaded = ScanCache(path)
        assert reloaded.get(2, 5) == record
        assert (2, 5) in reloaded
        assert reloaded.get(2, 5).tool_version == TOOL_VERSION

    def test_one_line_per_record(self, tmp_path, record):
        """Append writes a single LF-terminated JSON line."""
        path = tmp_path / "cache.jsonl"
        ScanCache(path).append(record)
        text = path.read_text()
        assert text.count("\n") == 1
        assert text.startswith('{"m":2,"N":5,"ord":4')

    def test_later_lines_win(self, tmp_path, record):
        """A rerun with a diameter shadows an older record."""
        path = tmp_path / "cache.jsonl"
        cache = ScanCache(path)
        cache.append(record.model_copy(update={"diameter": None}))
        cache.append(record)
        assert len(ScanCache(path)) == 1
        assert ScanCache(path).get(2, 5).diameter == 3

    def test_corrupt_lines_skipped(self, tmp_path, record, caplog):
        """Unparseable lines are counted and logged, not fatal."""
        path = tmp_path / "cache.jsonl"
        path.write_text(
            "not json\n"
            + record.model_dump_json() + "\n"
            + '{"m": 2}\n'
            + "\n"
        )
        with caplog.at_level(logging.WARNING, logger="boxscope_io.cache"):
            cache = ScanCache(path)
        assert cache.corrupt_lines == 2
        assert len(cache) == 1
        assert "skipped 2 corrupt line(s)" in caplog.text

    def test_records_sorted_and_filtered(self, tmp_path):
        """records() orders by (m, N) and can select one base."""
        cache = ScanCache(tmp_path / "cache.jsonl")
        for m, N in [(3, 7), (2, 9), (2, 3)]:
            cache.append(ScanRecord(m=m, N=N, ord=1, group_size=N, wall_time_ms=0.0))
        assert [r.key for r in cache.records()] == [(2, 3), (2, 9), (3, 7)]
        assert [r.key for r in cache.records(m=3)] == [(3, 7)]
        assert [r.key for r in cache] == [(2, 3), (2, 9), (3, 7)]

    def test_undecodable_line_skipped(self, tmp_path, record):
        """Invalid UTF-8 bytes count as one corrupt line."""
        path = tmp_path / "cache.jsonl"
        path.write_bytes(record.model_dump_json().encode() + b"\n\xff\xfe garbage\n")
        cache = ScanCache(path)
        assert cache.corrupt_lines == 1
        assert cache.get(2, 5) == record

    def test_inconsistent_record_skipped(self, tmp_path):
        """A line whose group_size is not N * ord is corrupt, not served."""
        path = tmp_path / "cache.jsonl"
        path.write_text(
            '{"m":2,"N":5,"ord":4,"group_size":999,"diameter":77,"wall_time_ms":0.0,"tool_version":"1.0.0"}\n'
        )
        cache = ScanCache(path)
        assert cache.corrupt_lines == 1
        assert cache.get(2, 5) is None
        assert sweep_diameters(2, [5], cache=cache)[0].diameter == 3


class TestScanRecordValidation:
    @pytest.mark.parametrize(
        "fields,message",
        [
            ({"m": 2, "N": 5, "ord": 4, "group_size": 21}, "group_size = N \\* ord required"),
            ({"m": 2, "N": 0, "ord": 4, "group_size": 0}, "N >= 1"),
            ({"m": 1, "N": 5, "ord": 1, "group_size": 5}, "m >= 2"),
            ({"m": 2, "N": 5, "ord": 4, "group_size": 20, "diameter": -1}, "diameter >= 0 required"),
        ],
    )
    def test_rejected(self, fields, message):
        """Measurements that cannot come from a quotient are rejected."""
        with pytest.raises(ValidationError, match=message):
            ScanRecord(wall_time_ms=0.0, **fields)
