"""Command-line front end.

Commands: run, energy, convergence, bench.  All output is plain data:
CSV traces/reports and bit-exact binary snapshots; plotting is external.
Exit codes: 0 ok, 2 configuration error, 3 runtime (solver) error,
4 I/O error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, get_scenario_checked, parse_config
from .executor import ExecutorConfig
from .grid import GridSpec
from .harness import make_schedule, run_bench, run_convergence
from .integrator import integrate
from .snapshot import write_snapshot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_IO = 4


def _fmt(x) -> str:
    return format(x, ".17g") if isinstance(x, float) else str(x)


def _write_csv(path, header: str, rows) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a key = value config file")
    common.add_argument("--tau", type=float, help="time step size")
    common.add_argument("--T", type=float, dest="T", help="final time")
    common.add_argument("--grid-n", type=int, dest="n", help="points per axis")
    common.add_argument("--dim", type=int, help="spatial dimension")
    common.add_argument("--scenario", help="initial-condition preset name")
    common.add_argument("--strategy", help="update-order strategy tag")
    common.add_argument("--seed", type=int, help="seed for random orders")
    common.add_argument("--executor", choices=("serial", "phased"))
    common.add_argument("--workers", type=int, help="worker thread count")
    common.add_argument("--out", help="output directory")
    common.add_argument("--snapshot-stride", type=int, dest="snapshot_stride")
    common.add_argument("--record-stride", type=int, dest="record_stride")

    parser = argparse.ArgumentParser(
        prog="dpavf",
        description="Structure-preserving Klein-Gordon-Schrodinger solver")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common],
                   help="integrate and emit energy trace plus snapshots")
    sub.add_parser("energy", parents=[common],
                   help="integrate and emit the energy trace")
    conv = sub.add_parser("convergence", parents=[common],
                          help="halve (h, tau) repeatedly and report orders")
    conv.add_argument("--levels", type=int, default=3)
    conv.add_argument("--no-reference", action="store_true",
                      help="skip the fine-step reference run (self-errors only)")
    bench = sub.add_parser("bench", parents=[common],
                           help="wall-clock scaling and speedup report")
    bench.add_argument("--n-list", default="256,512",
                       help="comma-separated grid sizes")
    bench.add_argument("--workers-list", default="1",
                       help="comma-separated worker counts")
    bench.add_argument("--reps", type=int, default=3)
    bench.add_argument("--steps", type=int, default=3)
    return parser


_OVERRIDE_KEYS = ("tau", "T", "n", "dim", "scenario", "strategy", "seed",
                  "executor", "workers", "out", "snapshot_stride",
                  "record_stride")


def _load_config(args):
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}
    return parse_config(args.config, overrides)


def _trace_rows(trace):
    return zip(trace.steps, trace.times, trace.energy, trace.rel_error,
               trace.mass)


def _run_common(cfg, with_snapshots: bool) -> int:
    grid = GridSpec(cfg.dim, cfg.a, cfg.b, cfg.n)
    scenario = get_scenario_checked(cfg.scenario)
    state = scenario.state(grid)
    schedule = make_schedule(cfg.strategy, grid, seed=cfg.seed,
                             workers=cfg.workers)
    os.makedirs(cfg.out, exist_ok=True)

    writer = None
    if with_snapshots and cfg.snapshot_stride > 0:
        def writer(snap_state, step):
            path = os.path.join(cfg.out, f"snapshot_{step:06d}.bin")
            write_snapshot(snap_state, grid, path)

    ex = ExecutorConfig(cfg.executor, cfg.workers).build()
    try:
        trace = integrate(state, grid, cfg.params, schedule, ex, cfg.tau,
                          cfg.T, record_stride=cfg.record_stride,
                          snapshot_stride=cfg.snapshot_stride if with_snapshots else 0,
                          snapshot_writer=writer)
    finally:
        ex.close()
    _write_csv(os.path.join(cfg.out, "energy.csv"),
               "step,time,energy,relative_error,mass", _trace_rows(trace))
    if trace.re_is_absolute:
        print("note: initial energy is zero; relative_error column holds "
              "absolute drift", file=sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    return _run_common(_load_config(args), with_snapshots=True)


def cmd_energy(args) -> int:
    cfg = _load_config(args)
    if cfg.snapshot_stride:
        print("warning: snapshot_stride is ignored by the energy command",
              file=sys.stderr)
    return _run_common(cfg, with_snapshots=False)


def cmd_convergence(args) -> int:
    cfg = _load_config(args)
    scenario = get_scenario_checked(cfg.scenario)
    rep = run_convergence(scenario, cfg.n, cfg.tau, cfg.T, levels=args.levels,
                          strategy=cfg.strategy, seed=cfg.seed,
                          compute_reference=not args.no_reference)
    os.makedirs(cfg.out, exist_ok=True)
    use_ref = not args.no_reference
    rows = [( "level%d" % i, r.N, r.h, r.tau,
              r.err_u_ref if use_ref else r.err_u_self,
              r.err_psi_ref if use_ref else r.err_psi_self)
            for i, r in enumerate(rep.levels)]
    orders = zip(rep.order_u_ref, rep.order_psi_ref) if use_ref else \
        zip(rep.order_u_self, rep.order_psi_self)
    rows += [("order", "", "", "", ou, opsi) for ou, opsi in orders]
    _write_csv(os.path.join(cfg.out, "convergence.csv"),
               "level,N,h,tau,err_u,err_psi", rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    try:
        n_list = [int(s) for s in args.n_list.split(",") if s]
        worker_list = [int(s) for s in args.workers_list.split(",") if s]
    except ValueError:
        raise ConfigError(
            f"bad --n-list/--workers-list: {args.n_list!r} {args.workers_list!r}")
    rep = run_bench(cfg.dim, n_list, worker_list, strategy=cfg.strategy,
                    tau=cfg.tau, steps=args.steps, repetitions=args.reps,
                    a=cfg.a, b=cfg.b, params=cfg.params, seed=cfg.seed)
    os.makedirs(cfg.out, exist_ok=True)
    rows = [(r.N, r.workers, r.strategy, r.seconds_per_step, r.speedup)
            for r in rep.rows]
    _write_csv(os.path.join(cfg.out, "bench.csv"),
               "N,workers,strategy,seconds_per_step,speedup", rows)
    for (small, large), ratio in rep.scaling_ratios.items():
        print(f"N {small} -> {large}: time ratio {ratio:.2f}")
    return EXIT_OK


_COMMANDS = {"run": cmd_run, "energy": cmd_energy,
             "convergence": cmd_convergence, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FloatingPointError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
