"""Worker-pool executor with futures, kernel-launch splitting and the
single-task inline-execution optimization.

Tasks live in per-worker deques; owners pop newest-first, idle workers steal
oldest-first.  A blocking wait on a future from inside a worker does not
stall the pool: the waiting worker keeps executing pending tasks until the
future resolves.  ``launch_kernel`` splits a kernel's cell range into
contiguous chunks; a single-task launch runs synchronously on the calling
thread and only bumps the ``inlined`` counter, never touching a queue.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

__all__ = ["TaskFuture", "WorkerPool", "LaunchStats", "split_range"]


class TaskFuture:
    """Single-assignment completion token (pending -> ready | failed)."""

    __slots__ = ("_pool", "_event", "_lock", "_value", "_error", "_done", "_callbacks")

    def __init__(self, pool: "WorkerPool | None" = None):
        self._pool = pool
        self._event = threading.Event()
        self._lock = threading.Lock()
        self._value = None
        self._error = None
        self._done = False
        self._callbacks = []

    # -- completion (runtime internal) --------------------------------------

    def _finish(self, value, error) -> None:
        with self._lock:
            if self._done:
                raise RuntimeError("future completed twice")
            self._value = value
            self._error = error
            self._done = True
            callbacks = self._callbacks
            self._callbacks = []
        self._event.set()
        for cb in callbacks:
            cb(self)

    def _complete(self, value) -> None:
        self._finish(value, None)

    def _fail(self, error: BaseException) -> None:
        self._finish(None, error)

    @classmethod
    def ready(cls, value) -> "TaskFuture":
        fut = cls()
        fut._complete(value)
        return fut

    @classmethod
    def failed(cls, error: BaseException) -> "TaskFuture":
        fut = cls()
        fut._fail(error)
        return fut

    # -- consumption ---------------------------------------------------------

    def done(self) -> bool:
        return self._done

    @property
    def state(self) -> str:
        if not self._done:
            return "pending"
        return "failed" if self._error is not None else "ready"

    def wait(self, timeout: float | None = None) -> bool:
        """Block until completion.  On a pool worker this helps execute
        pending tasks instead of sleeping, so nested waits cannot deadlock."""
        pool = self._pool
        if pool is not None and timeout is None:
            idx = pool._worker_index()
            if idx is not None:
                while not self._event.is_set():
                    if not pool._run_one(idx):
                        self._event.wait(0.0005)
                return True
        return self._event.wait(timeout)

    def result(self, timeout: float | None = None):
        if not self.wait(timeout):
            raise TimeoutError("future not completed within timeout")
        if self._error is not None:
            raise self._error
        return self._value

    def exception(self) -> BaseException | None:
        self.wait()
        return self._error

    def add_done_callback(self, fn) -> None:
        with self._lock:
            if not self._done:
                self._callbacks.append(fn)
                return
        fn(self)

    def then(self, fn) -> "TaskFuture":
        """Future of ``fn(result)``; a failure skips fn and propagates."""
        out = TaskFuture(self._pool)

        def fire(done: "TaskFuture"):
            if done._error is not None:
                out._fail(done._error)
                return
            try:
                out._complete(fn(done._value))
            except BaseException as exc:
                out._fail(exc)

        self.add_done_callback(fire)
        return out

    @staticmethod
    def when_all(futures, pool: "WorkerPool | None" = None) -> "TaskFuture":
        """Completes with the list of results once every input completed;
        fails with the first (in input order) failure.  Inherits a pool from
        its inputs so waiting on the result inside a worker keeps helping."""
        futures = list(futures)
        if pool is None:
            for f in futures:
                if f._pool is not None:
                    pool = f._pool
                    break
        out = TaskFuture(pool)
        if not futures:
            out._complete([])
            return out
        remaining = [len(futures)]
        lock = threading.Lock()

        def fire(_done):
            with lock:
                remaining[0] -= 1
                if remaining[0] > 0:
                    return
            for f in futures:
                if f._error is not None:
                    out._fail(f._error)
                    return
            out._complete([f._value for f in futures])

        for f in futures:
            f.add_done_callback(fire)
        return out


@dataclass(frozen=True)
class LaunchStats:
    """Counters: tasks pushed to queues vs kernel launches run inline."""

    spawned: int
    inlined: int


def split_range(n_items: int, n_tasks: int) -> list[tuple[int, int]]:
    """Contiguous near-equal chunks covering [0, n_items)."""
    base, rem = divmod(n_items, n_tasks)
    chunks = []
    start = 0
    for i in range(n_tasks):
        size = base + (1 if i < rem else 0)
        chunks.append((start, start + size))
        start += size
    return chunks


class WorkerPool:
    """P worker threads over per-worker deques with work stealing."""

    def __init__(self, workers: int):
        if workers < 1:
            raise ValueError(f"worker count must be >= 1, got {workers}")
        self.workers = workers
        self._deques = [deque() for _ in range(workers)]
        self._cond = threading.Condition()
        self._tls = threading.local()
        self._shutdown = False
        self._rr = 0
        self._stats_lock = threading.Lock()
        self._spawned = 0
        self._inlined = 0
        self._threads = [
            threading.Thread(target=self._worker_loop, args=(i,), daemon=True, name=f"pool-{i}")
            for i in range(workers)
        ]
        for t in self._threads:
            t.start()

    # -- internals -----------------------------------------------------------

    def _worker_index(self) -> int | None:
        return getattr(self._tls, "index", None)

    def _take(self, idx: int):
        # own deque newest-first, then steal oldest-first from the others
        try:
            return self._deques[idx].pop()
        except IndexError:
            pass
        for off in range(1, self.workers):
            victim = (idx + off) % self.workers
            try:
                return self._deques[victim].popleft()
            except IndexError:
                continue
        return None

    def _run_one(self, idx: int) -> bool:
        task = self._take(idx)
        if task is None:
            return False
        fn, args, fut = task
        try:
            fut._complete(fn(*args))
        except BaseException as exc:
            fut._fail(exc)
        return True

    def _worker_loop(self, idx: int) -> None:
        self._tls.index = idx
        while True:
            if self._run_one(idx):
                continue
            with self._cond:
                if self._shutdown and not any(self._deques):
                    return
                self._cond.wait(0.01)

    # -- public API ----------------------------------------------------------

    def spawn(self, fn, *args) -> TaskFuture:
        """Run ``fn(*args)`` exactly once on some worker."""
        if self._shutdown:
            raise RuntimeError("pool is shut down")
        fut = TaskFuture(self)
        idx = self._worker_index()
        if idx is None:
            idx = self._rr % self.workers
            self._rr += 1
        self._deques[idx].append((fn, args, fut))
        with self._stats_lock:
            self._spawned += 1
        with self._cond:
            self._cond.notify()
        return fut

    def launch_kernel(self, chunk_fn, n_items: int, n_tasks: int) -> TaskFuture:
        """Split [0, n_items) into n_tasks contiguous chunks of chunk_fn(i0, i1).

        n_tasks == 1 executes the single chunk synchronously on the calling
        thread (inline optimization); otherwise the chunks are spawned and the
        returned future is their when_all.  Outputs are bitwise independent
        of n_tasks because chunks write disjoint cell ranges.
        """
        if n_tasks < 1:
            raise ValueError(f"n_tasks must be >= 1, got {n_tasks}")
        if n_tasks == 1:
            with self._stats_lock:
                self._inlined += 1
            try:
                return TaskFuture.ready(chunk_fn(0, n_items))
            except BaseException as exc:
                return TaskFuture.failed(exc)
        futures = [self.spawn(chunk_fn, i0, i1) for i0, i1 in split_range(n_items, n_tasks)]
        return TaskFuture.when_all(futures, self)

    @property
    def stats(self) -> LaunchStats:
        with self._stats_lock:
            return LaunchStats(self._spawned, self._inlined)

    def shutdown(self) -> None:
        """Drain queued tasks, then stop the workers."""
        self._shutdown = True
        with self._cond:
            self._cond.notify_all()
        for t in self._threads:
            t.join()

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc_info) -> None:
        self.shutdown()
