"""Experiment harness: runs a scenario over the worker pool, times every
kernel launch, and emits the benchmark CSV.

Per timestep: ``gravity_per_step`` iterations of (ghost exchange + monopole +
multipole over all leaves, launched as futures and joined), then
``hydro_per_step`` iterations of (ghost exchange + reconstruct + flux +
hydro_update).  dt is fixed for the whole step from the pre-step maximum
wave speed (one third of cfl*dx/s: three axes contribute to the unsplit
update), so runs are deterministic and bitwise independent of the backend,
thread count and multipole task split.
"""

from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .kernels.legacy import legacy_flux, legacy_reconstruct
from .octree import Octree, exchange_ghosts, leaf_iter, neighborhood27
from .profiling import ProfileRecord, Profiler
from .runtime import LaunchStats, TaskFuture, WorkerPool
from .scenarios import ScenarioConfig, init_scenario
from .simd import get_backend

__all__ = [
    "KERNEL_ORDER",
    "CSV_HEADER",
    "BenchRecord",
    "RunResult",
    "run_scenario",
    "sweep",
    "write_csv",
    "expected_row_count",
]

KERNEL_ORDER = ("reconstruct", "flux", "hydro_update", "monopole", "multipole")
HYDRO_KERNELS = ("simd", "scalar", "legacy")
GRAVITY_KERNELS = ("simd", "scalar")

CSV_HEADER = (
    "scenario,backend,simd_width,threads,tasks_per_multipole,"
    "kernel,count,mean_ns,total_ns,computation_s"
)


@dataclass(frozen=True)
class BenchRecord:
    scenario: str
    backend: str
    simd_width: int
    threads: int
    tasks_per_multipole: int
    kernel: str
    count: int
    mean_ns: float
    total_ns: int
    computation_s: float

    def csv_row(self) -> str:
        return (
            f"{self.scenario},{self.backend},{self.simd_width},{self.threads},"
            f"{self.tasks_per_multipole},{self.kernel},{self.count},"
            f"{self.mean_ns!r},{self.total_ns},{self.computation_s!r}"
        )


@dataclass
class RunResult:
    config: ScenarioConfig
    backend: str
    threads: int
    tasks_per_multipole: int
    tree: Octree
    records: tuple[ProfileRecord, ...]
    computation_s: float
    launch_stats: LaunchStats


def _join(futures, step: int):
    for fut in futures:
        try:
            fut.result()
        except K.KernelError as exc:
            raise K.KernelError(f"step {step}: {exc}") from exc


def run_scenario(
    cfg: ScenarioConfig,
    backend: str = "scalar",
    threads: int = 1,
    tasks_per_multipole: int = 1,
    hydro_kernel: str = "simd",
    gravity_kernel: str = "simd",
    profiler: Profiler | None = None,
) -> RunResult:
    """Execute ``cfg.stop_step`` timesteps and return the profile + final tree."""
    bk = get_backend(backend)
    if tasks_per_multipole < 1:
        raise ValueError(f"tasks_per_multipole must be >= 1, got {tasks_per_multipole}")
    if hydro_kernel not in HYDRO_KERNELS:
        raise ValueError(f"hydro_kernel must be one of {HYDRO_KERNELS}, got {hydro_kernel!r}")
    if gravity_kernel not in GRAVITY_KERNELS:
        raise ValueError(f"gravity_kernel must be one of {GRAVITY_KERNELS}, got {gravity_kernel!r}")

    hydro_backend = bk.name if hydro_kernel == "simd" else "scalar"
    gravity_backend = bk.name if gravity_kernel == "simd" else "scalar"
    if hydro_kernel == "legacy":
        do_reconstruct, do_flux = legacy_reconstruct, legacy_flux
    else:
        do_reconstruct, do_flux = K.reconstruct, K.flux

    tree = init_scenario(cfg)
    prof = profiler if profiler is not None else Profiler()
    hcfg = cfg.hydro
    gcfg = cfg.gravity
    n_cells = K.INTERIOR_CELLS

    with WorkerPool(threads) as pool:

        def gravity_job(leaf_id: int):
            target = tree.leaves[leaf_id]
            sources = neighborhood27(tree, leaf_id)
            prof.timed(
                "monopole",
                lambda: pool.launch_kernel(
                    lambda i0, i1: K.monopole_kernel(target, sources, gcfg, gravity_backend),
                    n_cells,
                    1,
                ).result(),
            )
            run_chunk = K.multipole_prepare(target, sources, gcfg, gravity_backend)
            prof.timed(
                "multipole",
                lambda: pool.launch_kernel(run_chunk, n_cells, tasks_per_multipole).result(),
            )

        def hydro_job(leaf_id: int, dt: float):
            leaf = tree.leaves[leaf_id]
            q = prof.timed(
                "reconstruct",
                lambda: pool.launch_kernel(
                    lambda i0, i1: do_reconstruct(leaf, hcfg, hydro_backend), n_cells, 1
                ).result(),
            )
            fl = prof.timed(
                "flux",
                lambda: pool.launch_kernel(
                    lambda i0, i1: do_flux(leaf, q, hcfg, hydro_backend), n_cells, 1
                ).result(),
            )
            prof.timed(
                "hydro_update",
                lambda: pool.launch_kernel(
                    lambda i0, i1: K.hydro_update(leaf, fl, dt, hcfg), n_cells, 1
                ).result(),
            )

        with prof.region("total"):
            for step in range(cfg.stop_step):
                if cfg.gravity_per_step:
                    for leaf in tree.leaves:
                        leaf.interior("mass")[...] = leaf.interior("rho") * leaf.dx**3
                    for _ in range(cfg.gravity_per_step):
                        exchange_ghosts(tree, "gravity")
                        _join([pool.spawn(gravity_job, i) for i in leaf_iter(tree)], step)
                s_pre = max(K.max_wavespeed(leaf, hcfg) for leaf in tree.leaves)
                dt = hcfg.cfl * tree.dx / (3.0 * s_pre)
                for _ in range(cfg.hydro_per_step):
                    exchange_ghosts(tree, "hydro")
                    _join([pool.spawn(hydro_job, i, dt) for i in leaf_iter(tree)], step)

        stats = pool.stats

    records = prof.report()
    total_ns = next(r.total_ns for r in records if r.name == "total")
    return RunResult(
        config=cfg,
        backend=bk.name,
        threads=threads,
        tasks_per_multipole=tasks_per_multipole,
        tree=tree,
        records=records,
        computation_s=total_ns / 1e9,
        launch_stats=stats,
    )


def bench_records(result: RunResult) -> list[BenchRecord]:
    """One row per kernel (fixed order) plus the total row."""
    by_name = {r.name: r for r in result.records}
    width = get_backend(result.backend).width
    rows = []
    for kernel in KERNEL_ORDER:
        rec = by_name.get(kernel)
        if rec is None:
            continue
        rows.append(
            BenchRecord(
                scenario=result.config.name,
                backend=result.backend,
                simd_width=width,
                threads=result.threads,
                tasks_per_multipole=result.tasks_per_multipole,
                kernel=kernel,
                count=rec.count,
                mean_ns=rec.mean_ns,
                total_ns=rec.total_ns,
                computation_s=result.computation_s,
            )
        )
    total = by_name["total"]
    rows.append(
        BenchRecord(
            scenario=result.config.name,
            backend=result.backend,
            simd_width=width,
            threads=result.threads,
            tasks_per_multipole=result.tasks_per_multipole,
            kernel="total",
            count=total.count,
            mean_ns=total.mean_ns,
            total_ns=total.total_ns,
            computation_s=result.computation_s,
        )
    )
    return rows


def write_csv(path: str, rows: list[BenchRecord]) -> None:
    """Append rows (with a header when the file is new/empty); UTF-8, LF."""
    need_header = not os.path.exists(path) or os.path.getsize(path) == 0
    with io.open(path, "a", encoding="utf-8", newline="") as fh:
        if need_header:
            fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_row() + "\n")


def expected_row_count(scenario_name: str, n_runs: int) -> int:
    """Rows a sweep emits: one per kernel plus a total row, per run."""
    kernels = 5 if scenario_name == "rotating-star-proxy" else 3
    return n_runs * (kernels + 1)


def sweep(
    cfg: ScenarioConfig,
    thread_list: list[int],
    backend_list: list[str],
    csv_path: str,
    tasks_per_multipole: int = 1,
    hydro_kernel: str = "simd",
    gravity_kernel: str = "simd",
) -> list[BenchRecord]:
    """One run per (threads, backend) pair; rows appended to csv_path."""
    if not thread_list or not backend_list:
        raise ValueError("thread and backend lists must be non-empty")
    for name in backend_list:
        get_backend(name)
    all_rows: list[BenchRecord] = []
    for threads in thread_list:
        for backend in backend_list:
            result = run_scenario(
                cfg,
                backend=backend,
                threads=threads,
                tasks_per_multipole=tasks_per_multipole,
                hydro_kernel=hydro_kernel,
                gravity_kernel=gravity_kernel,
            )
            all_rows.extend(bench_records(result))
    write_csv(csv_path, all_rows)
    return all_rows
