"""Command-line harness: single scenario runs and threads-x-backends sweeps."""

from __future__ import annotations

import argparse
import sys

from .driver import (
    GRAVITY_KERNELS,
    HYDRO_KERNELS,
    bench_records,
    run_scenario,
    sweep,
    write_csv,
)
from .kernels import KernelError
from .scenarios import SCENARIO_NAMES, ScenarioConfig
from .simd import BackendUnavailableError, available_backends, get_backend


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simdgrid-bench",
        description="Run octree subgrid kernel scenarios and emit per-kernel timing CSV.",
    )
    p.add_argument("--scenario", choices=SCENARIO_NAMES, default="rotating-star-proxy")
    p.add_argument("--max-level", type=int, default=3, help="octree depth (8^L leaves)")
    p.add_argument("--stop-step", type=int, default=10, help="number of timesteps")
    p.add_argument("--theta", type=float, default=0.34, help="gravity opening parameter")
    p.add_argument("--backend", default=None, help="SIMD backend name (default scalar)")
    p.add_argument("--threads", type=int, default=None, help="worker thread count (default 1)")
    p.add_argument("--tasks-per-multipole", type=int, default=1,
                   help="tasks each multipole launch is split into (16 mirrors the many-task configuration)")
    p.add_argument("--hydro-kernel", choices=HYDRO_KERNELS, default="simd")
    p.add_argument("--gravity-kernel", choices=GRAVITY_KERNELS, default="simd")
    p.add_argument("--disable-output", action="store_true", help="suppress the stdout report")
    p.add_argument("--csv", metavar="PATH", default=None, help="append benchmark rows to PATH")
    p.add_argument("--sweep", metavar="T1,T2,...xB1,B2,...", default=None,
                   help="sweep thread counts x backends (e.g. '1,2,4xscalar,emulated4'); requires --csv")
    return p


def _parse_sweep(spec: str) -> tuple[list[int], list[str]]:
    normalized = spec.replace("×", "x")
    parts = normalized.split("x")
    if len(parts) != 2:
        raise ValueError(
            f"sweep spec must look like 't1,t2,...xb1,b2,...', got {spec!r}"
        )
    threads = [int(t) for t in parts[0].split(",") if t]
    backends = [b.strip() for b in parts[1].split(",") if b.strip()]
    if not threads or not backends:
        raise ValueError(f"sweep spec needs at least one thread count and one backend: {spec!r}")
    return threads, backends


def _print_report(result) -> None:
    cfg = result.config
    print(
        f"{cfg.name}: L={cfg.max_level} steps={cfg.stop_step} "
        f"backend={result.backend} threads={result.threads} "
        f"tasks_per_multipole={result.tasks_per_multipole}"
    )
    print(f"{'kernel':<14}{'count':>8}{'mean_ns':>16}{'total_ns':>16}")
    for rec in result.records:
        print(f"{rec.name:<14}{rec.count:>8}{rec.mean_ns:>16.1f}{rec.total_ns:>16}")
    print(f"computation time: {result.computation_s:.6f} s")
    stats = result.launch_stats
    print(f"tasks spawned: {stats.spawned}, kernel launches inlined: {stats.inlined}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.sweep is not None and (args.backend is not None or args.threads is not None):
        print("error: --sweep conflicts with --backend/--threads", file=sys.stderr)
        return 2
    backend = args.backend if args.backend is not None else "scalar"
    threads = args.threads if args.threads is not None else 1

    try:
        cfg = ScenarioConfig(
            name=args.scenario,
            max_level=args.max_level,
            stop_step=args.stop_step,
            theta=args.theta,
            disable_output=args.disable_output,
        )
        if args.sweep is not None:
            if args.csv is None:
                print("error: --sweep requires --csv PATH", file=sys.stderr)
                return 2
            thread_list, backend_list = _parse_sweep(args.sweep)
            rows = sweep(
                cfg,
                thread_list,
                backend_list,
                args.csv,
                tasks_per_multipole=args.tasks_per_multipole,
                hydro_kernel=args.hydro_kernel,
                gravity_kernel=args.gravity_kernel,
            )
            if not args.disable_output:
                print(f"sweep complete: {len(rows)} rows appended to {args.csv}")
            return 0
        get_backend(backend)
        result = run_scenario(
            cfg,
            backend=backend,
            threads=threads,
            tasks_per_multipole=args.tasks_per_multipole,
            hydro_kernel=args.hydro_kernel,
            gravity_kernel=args.gravity_kernel,
        )
        if args.csv is not None:
            write_csv(args.csv, bench_records(result))
        if not args.disable_output:
            _print_report(result)
        return 0
    except BackendUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"valid backends: {', '.join(available_backends())}", file=sys.stderr)
        return 2
    except (ValueError, KernelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
