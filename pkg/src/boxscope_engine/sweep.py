"""
Boxscope Engine Sweeps

Worker-pool orchestration for batches of independent computations.
Results always come back in input order; only the calling process
touches the cache, so the cache keeps a single writer.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Optional, Protocol, Sequence, TypeVar

from boxscope_engine.arith import coprime_moduli, mult_order
from boxscope_engine.cayley import build_graph, diameter
from boxscope_engine.models import DEFAULT_MAX_VERTICES, ScanRecord
from boxscope_engine.quotient import build_quotient
from boxscope_engine.validation import require_base, require_positive

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class RecordStore(Protocol):
    """What a sweep needs from a ScanRecord cache."""

    def get(self, m: int, N: int) -> Optional[ScanRecord]: ...

    def append(self, record: ScanRecord) -> None: ...


def ordered_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    jobs: int = 1,
    on_result: Optional[Callable[[int, R], None]] = None,
    chunksize: int = 1,
) -> list[R]:
    """
    Apply fn to every item, in a process pool when jobs > 1.

    fn must be a picklable top-level function. on_result(i, result) is called
    in the calling process, in input order.
    """
    require_positive("jobs", jobs)
    results: list[R] = []
    if jobs == 1 or len(items) <= 1:
        mapped: Iterable[R] = map(fn, items)
        for i, result in enumerate(mapped):
            results.append(result)
            if on_result:
                on_result(i, result)
        return results

    logger.debug("ordered_map: %d items over %d workers", len(items), jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for i, result in enumerate(pool.map(fn, items, chunksize=chunksize)):
            results.append(result)
            if on_result:
                on_result(i, result)
    return results


def measure_quotient(m: int, N: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> ScanRecord:
    """Order, size and (under the vertex cap) diameter of G_m / G_m(N)."""
    start = time.perf_counter()
    cert = mult_order(m, N)
    Q = build_quotient(m, N, cert)
    diam = None
    if Q.size <= max_vertices:
        diam = diameter(build_graph(Q, max_vertices))
    return ScanRecord(
        m=m,
        N=N,
        ord=cert.order,
        group_size=Q.size,
        diameter=diam,
        wall_time_ms=(time.perf_counter() - start) * 1000,
    )


def _measure_task(task: tuple[int, int, int]) -> ScanRecord:
    m, N, max_vertices = task
    return measure_quotient(m, N, max_vertices)


def sweep_diameters(
    m: int,
    moduli: Iterable[int],
    max_vertices: int = DEFAULT_MAX_VERTICES,
    jobs: int = 1,
    cache: Optional[RecordStore] = None,
    on_result: Optional[Callable[[ScanRecord], None]] = None,
) -> list[ScanRecord]:
    """
    ScanRecords for every modulus, reusing cached records.

    A cached record without a diameter is recomputed when the group now fits
    under the cap. Fresh records are appended to the cache as they arrive.
    """
    require_base(m)
    moduli = list(moduli)
    found: dict[int, ScanRecord] = {}
    todo: list[int] = []
    for N in moduli:
        cached = cache.get(m, N) if cache is not None else None
        if cached is not None and (cached.diameter is not None or cached.group_size > max_vertices):
            found[N] = cached
            if on_result:
                on_result(cached)
        else:
            todo.append(N)
    logger.debug("sweep_diameters: %d cached, %d to compute", len(found), len(todo))

    def _collect(i: int, record: ScanRecord) -> None:
        found[record.N] = record
        if cache is not None:
            cache.append(record)
        if on_result:
            on_result(record)

    ordered_map(_measure_task, [(m, N, max_vertices) for N in todo], jobs=jobs, on_result=_collect)
    return [found[N] for N in moduli]


def sweep_moduli(m: int, n_max: int, n_min: int = 1) -> list[int]:
    """All N in [n_min, n_max] coprime to m."""
    return list(coprime_moduli(m, n_max, n_min))


def replay_record(record: ScanRecord, max_vertices: int = DEFAULT_MAX_VERTICES) -> tuple[bool, ScanRecord]:
    """Recompute a cached record; True when ord and diameter reproduce."""
    cap = max_vertices
    if record.diameter is not None:
        cap = max(cap, record.group_size)
    fresh = measure_quotient(record.m, record.N, cap)
    same = fresh.ord == record.ord and fresh.group_size == record.group_size
    if record.diameter is not None:
        same = same and fresh.diameter == record.diameter
    return same, fresh
