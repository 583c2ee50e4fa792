"""Annotated-region wall timing with per-name count/mean/total aggregation.

Each thread accumulates into its own dict (values are immutable
(count, total_ns) tuples, replaced atomically under the GIL), so timing adds
no cross-thread contention; ``report()`` merges a consistent snapshot and may
run concurrently with timing.  The clock is injectable for deterministic
tests."""

from __future__ import annotations

import threading
import time
from contextlib import contextmanager
from dataclasses import dataclass

__all__ = ["ProfileRecord", "Profiler"]


@dataclass(frozen=True)
class ProfileRecord:
    name: str
    count: int
    total_ns: int

    @property
    def mean_ns(self) -> float:
        return self.total_ns / self.count


class Profiler:
    def __init__(self, clock=time.perf_counter_ns):
        self._clock = clock
        self._registry: list[dict] = []
        self._lock = threading.Lock()
        self._tls = threading.local()

    def _local(self) -> dict:
        d = getattr(self._tls, "records", None)
        if d is None:
            d = {}
            self._tls.records = d
            with self._lock:
                self._registry.append(d)
        return d

    def _add(self, name: str, elapsed: int) -> None:
        d = self._local()
        count, total = d.get(name, (0, 0))
        d[name] = (count + 1, total + elapsed)

    def timed(self, name: str, work):
        """Run ``work()``, add its wall time to the record for ``name`` and
        pass the result through.  Nesting is allowed."""
        t0 = self._clock()
        try:
            return work()
        finally:
            self._add(name, self._clock() - t0)

    @contextmanager
    def region(self, name: str):
        t0 = self._clock()
        try:
            yield
        finally:
            self._add(name, self._clock() - t0)

    def report(self) -> tuple[ProfileRecord, ...]:
        """Snapshot of all records, ordered by name."""
        merged: dict[str, tuple[int, int]] = {}
        with self._lock:
            dicts = list(self._registry)
        for d in dicts:
            for name, (count, total) in list(d.items()):
                c, t = merged.get(name, (0, 0))
                merged[name] = (c + count, t + total)
        return tuple(
            ProfileRecord(name, count, total)
            for name, (count, total) in sorted(merged.items())
        )

    def total_ns(self, name: str) -> int:
        for rec in self.report():
            if rec.name == name:
                return rec.total_ns
        return 0
