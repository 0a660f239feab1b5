"""Executors that drive a schedule's phase plan over a lane function.

A "lane function" takes an int64 index array and applies the per-point
kernel at each index, in order.  Executors only decide who calls it when;
they never touch field data, so determinism is structural: disjoint lane
write sets plus the phase barrier make the phased result bitwise equal to
the serial one for any worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .ordering import UpdateSchedule


@dataclass(frozen=True)
class ExecutorConfig:
    mode: str = "serial"   # "serial" | "phased"
    workers: int = 1

    def __post_init__(self):
        if self.mode not in ("serial", "phased"):
            raise ValueError(f"unknown executor mode {self.mode!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def build(self) -> "SerialExecutor | PhasedExecutor":
        if self.mode == "serial":
            return SerialExecutor()
        return PhasedExecutor(self.workers)


class SerialExecutor:
    """Runs the whole sweep on the calling thread, in rank order."""

    workers = 1

    def run(self, schedule: UpdateSchedule, lane_fn) -> None:
        lane_fn(schedule.serial_order())

    def close(self) -> None:
        pass


class PhasedExecutor:
    """Phase-by-phase execution with a full barrier between phases.

    Lanes of a parallel phase are distributed over a thread pool; serial
    phases run on the calling thread.  Kernels must release the GIL (the
    compiled sweeps do) for actual concurrency.
    """

    def __init__(self, workers: int):
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self._pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def run(self, schedule: UpdateSchedule, lane_fn) -> None:
        if not schedule.validated:
            raise ValueError(
                "schedule has not passed validation; run validate_schedule first")
        for phase in schedule.phases:
            if phase.parallel and self._pool is not None and len(phase.lanes) > 1:
                futures = [self._pool.submit(lane_fn, lane) for lane in phase.lanes]
                for f in futures:
                    f.result()  # barrier; re-raises lane errors
            else:
                for lane in phase.lanes:
                    lane_fn(lane)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def execute_serial(schedule: UpdateSchedule, lane_fn) -> None:
    SerialExecutor().run(schedule, lane_fn)


def execute_phased(schedule: UpdateSchedule, lane_fn, workers: int) -> None:
    ex = PhasedExecutor(workers)
    try:
        ex.run(schedule, lane_fn)
    finally:
        ex.close()
