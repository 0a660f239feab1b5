"""Experiment drivers: convergence studies, energy traces, benchmarks.

The reference solution for convergence studies is a single fine-step RK4
run on the finest tested grid, restricted to each coarser level at the
coincident nodes (combined space-time error); self-convergence between
successive (h, tau) halvings provides a reference-free cross-check.
"""
from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field

import numpy as np

from .executor import PhasedExecutor, SerialExecutor
from .grid import FieldState, GridSpec, PhysParams
from .integrator import (EnergyTrace, integrate, precompute_coefficients,
                         step_dpavf2)
from .oracle import rk4_reference
from .ordering import (UpdateSchedule, block_split_schedule,
                       checkerboard_schedule, lexicographic_schedule,
                       random_schedule)
from .scenarios import ScenarioSpec, seeded_random_state


def make_schedule(strategy: str, grid: GridSpec, seed: int = 0,
                  workers: int = 1) -> UpdateSchedule:
    """Build a schedule from its strategy tag."""
    if strategy == "lexicographic-forward":
        return lexicographic_schedule(grid, forward=True)
    if strategy == "lexicographic-reverse":
        return lexicographic_schedule(grid, forward=False)
    if strategy == "seeded-random":
        return random_schedule(grid, seed)
    if strategy == "block-split":
        return block_split_schedule(grid, workers)
    if strategy == "checkerboard":
        return checkerboard_schedule(grid, workers)
    raise ValueError(f"unknown schedule strategy {strategy!r}")


def _l2(diff: np.ndarray, grid: GridSpec) -> float:
    return float(np.sqrt(grid.h**grid.d * np.dot(diff, diff)))


def _psi_l2(dP: np.ndarray, dQ: np.ndarray, grid: GridSpec) -> float:
    return float(np.sqrt(grid.h**grid.d * (np.dot(dP, dP) + np.dot(dQ, dQ))))


def _restrict(field_flat: np.ndarray, fine: GridSpec,
              factor: int = 2) -> np.ndarray:
    """Values of a fine-grid field at the coincident coarse nodes."""
    f = field_flat.reshape(fine.shape)
    return f[(slice(None, None, factor),) * fine.d].ravel()


@dataclass
class ConvergenceLevel:
    N: int
    h: float
    tau: float
    err_u_ref: float = math.nan
    err_psi_ref: float = math.nan
    err_u_self: float = math.nan   # vs the next-finer level
    err_psi_self: float = math.nan


@dataclass
class ConvergenceReport:
    levels: list
    order_u_ref: list = field(default_factory=list)
    order_psi_ref: list = field(default_factory=list)
    order_u_self: list = field(default_factory=list)
    order_psi_self: list = field(default_factory=list)


def _orders(errors: list) -> list:
    out = []
    for a, b in zip(errors, errors[1:]):
        out.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
    return out


def run_convergence(scenario: ScenarioSpec, N0: int, tau0: float, T: float,
                    levels: int = 3, strategy: str = "lexicographic-forward",
                    seed: int = 0, compute_reference: bool = True,
                    tau_ref: float | None = None) -> ConvergenceReport:
    """Halve (h, tau) together `levels` times and measure errors both ways.

    Reference errors use a single fine-step RK4 run on the *finest* tested
    grid, restricted to each level's coincident nodes (combined space-time
    error); self-errors compare successive levels directly.
    """
    if levels < 2:
        raise ValueError("need at least 2 levels")
    if tau_ref is None:
        tau_ref = tau0 / 200.0
    rows = []
    finals = []
    ex = SerialExecutor()
    for lvl in range(levels):
        grid = scenario.default_grid(N0 * 2**lvl)
        tau = tau0 / 2**lvl
        state = scenario.state(grid)
        schedule = make_schedule(strategy, grid, seed=seed)
        integrate(state, grid, scenario.params, schedule, ex, tau, T,
                  record_stride=max(1, int(round(T / tau))))
        rows.append(ConvergenceLevel(grid.N, grid.h, tau))
        finals.append((grid, state))
    if compute_reference:
        fine_grid = finals[-1][0]
        ref = rk4_reference(scenario.state(fine_grid), scenario.params,
                            fine_grid, tau_ref, T).state
        for lvl, (grid, state) in enumerate(finals):
            factor = 2**(levels - 1 - lvl)
            rU = _restrict(ref.U, fine_grid, factor)
            rP = _restrict(ref.P, fine_grid, factor)
            rQ = _restrict(ref.Q, fine_grid, factor)
            rows[lvl].err_u_ref = _l2(state.U - rU, grid)
            rows[lvl].err_psi_ref = _psi_l2(state.P - rP, state.Q - rQ, grid)
    for lvl in range(levels - 1):
        cg, cs = finals[lvl]
        fg, fs = finals[lvl + 1]
        rows[lvl].err_u_self = _l2(cs.U - _restrict(fs.U, fg), cg)
        rows[lvl].err_psi_self = _psi_l2(cs.P - _restrict(fs.P, fg),
                                         cs.Q - _restrict(fs.Q, fg), cg)
    rep = ConvergenceReport(rows)
    if compute_reference:
        rep.order_u_ref = _orders([r.err_u_ref for r in rows])
        rep.order_psi_ref = _orders([r.err_psi_ref for r in rows])
    rep.order_u_self = _orders([r.err_u_self for r in rows[:-1]])
    rep.order_psi_self = _orders([r.err_psi_self for r in rows[:-1]])
    return rep


def run_energy_experiment(scenario: ScenarioSpec, N: int, tau: float, T: float,
                          strategy: str = "lexicographic-forward",
                          seed: int = 0, seeds=None, workers: int = 1,
                          phased: bool = False,
                          record_stride: int = 1):
    """Integrate and return an EnergyTrace (or one per seed in `seeds`).

    With `seeds` set, each run uses a seeded-random schedule; otherwise a
    single run with the requested strategy.
    """
    grid = scenario.default_grid(N)
    ex = PhasedExecutor(workers) if phased else SerialExecutor()
    try:
        if seeds is not None:
            traces = []
            for s in seeds:
                state = scenario.state(grid)
                schedule = make_schedule("seeded-random", grid, seed=s)
                traces.append(integrate(state, grid, scenario.params, schedule,
                                        ex, tau, T, record_stride=record_stride))
            return traces
        state = scenario.state(grid)
        schedule = make_schedule(strategy, grid, seed=seed, workers=workers)
        return integrate(state, grid, scenario.params, schedule, ex, tau, T,
                         record_stride=record_stride)
    finally:
        ex.close()


@dataclass
class BenchRow:
    N: int
    workers: int
    strategy: str
    seconds_per_step: float
    speedup: float  # vs the 1-worker row at the same (N, strategy)


@dataclass
class BenchReport:
    d: int
    rows: list
    scaling_ratios: dict  # (N_small, N_large) -> time ratio at 1 worker


def run_bench(d: int, N_list, worker_list, strategy: str = "checkerboard",
              tau: float = 0.01, steps: int = 3, repetitions: int = 3,
              a: float = -10.0, b: float = 10.0,
              params: PhysParams | None = None, seed: int = 7) -> BenchReport:
    """Median per-step wall time over (N, workers); reporting only.

    Timing excludes state construction, schedule building and JIT warmup
    (one untimed step precedes the measured repetitions).
    """
    if repetitions < 3:
        raise ValueError("need at least 3 repetitions for a stable median")
    params = params or PhysParams()
    rows = []
    base_time = {}
    for N in N_list:
        grid = GridSpec(d, a, b, N)
        for workers in worker_list:
            schedule = make_schedule(strategy, grid, seed=seed, workers=workers)
            coeffs_half = precompute_coefficients(params, tau / 2.0, grid)
            ex = PhasedExecutor(workers) if workers > 1 else SerialExecutor()
            try:
                state = seeded_random_state(grid, seed, 0.1)
                step_dpavf2(state, schedule, coeffs_half, ex, grid)  # warmup
                samples = []
                for _ in range(repetitions):
                    t0 = time.perf_counter()
                    for _ in range(steps):
                        step_dpavf2(state, schedule, coeffs_half, ex, grid)
                    samples.append((time.perf_counter() - t0) / steps)
            finally:
                ex.close()
            sec = statistics.median(samples)
            if workers == min(worker_list):
                base_time[N] = sec
            rows.append(BenchRow(N, workers, strategy, sec,
                                 base_time[N] / sec))
    ratios = {}
    ns = sorted(set(N_list))
    for small, large in zip(ns, ns[1:]):
        if small in base_time and large in base_time:
            ratios[(small, large)] = base_time[large] / base_time[small]
    return BenchReport(d, rows, ratios)
