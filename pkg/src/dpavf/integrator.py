"""Time integrators: base and adjoint sweeps and their composition.

One call to the base sweep advances every point by tau using the update
order of the schedule; the adjoint sweep uses the reversed order with the
U-V/Psi staging swapped.  Composing both at half steps gives the
second-order, time-symmetric method.  Every variant conserves the
discrete energy exactly (up to roundoff) for any update order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .grid import FieldState, GridSpec, PhysParams, discrete_energy, mass
from .ordering import UpdateSchedule, reverse_schedule, validate_schedule


@dataclass(frozen=True)
class StepCoefficients:
    """Precomputed pointwise solve constants for step size tau.

    The Psi pivot is (i - alpha + gcoef*U); its squared modulus is
    (gcoef*U - alpha)^2 + 1 >= 1, so the complex solve never becomes
    singular for finite real inputs.  uv_inv is the inverse of
    [[1, -tau/2], [c_uv, 1]], whose determinant 1 + (tau/2)*c_uv is
    positive for tau > 0.
    """

    tau: float
    alpha: float      # Psi center weight  tau*kappa1*d / (2 h^2)
    beta: float       # Psi neighbor weight  tau*kappa1 / (2 h^2)
    gcoef: float      # Psi coupling weight  tau*gamma / 2
    c_uv: float       # tau*kappa2*d/h^2 + tau*mu^2/2
    uv_nbr: float     # tau*kappa2 / h^2
    gU: float         # tau*gamma
    uv_inv: tuple     # ((i00, i01), (i10, i11))

    def kernel_args(self) -> tuple:
        (i00, i01), (i10, i11) = self.uv_inv
        return (self.alpha, self.beta, self.gcoef, self.c_uv, self.uv_nbr,
                self.gU, self.tau / 2.0, i00, i01, i10, i11)


def precompute_coefficients(params: PhysParams, tau: float,
                            grid: GridSpec) -> StepCoefficients:
    if tau == 0.0 or not math.isfinite(tau):
        raise ValueError(f"step size must be nonzero and finite, got tau={tau}")
    h2 = grid.h**2
    d = grid.d
    alpha = tau * params.kappa1 * d / (2.0 * h2)
    beta = tau * params.kappa1 / (2.0 * h2)
    gcoef = tau * params.gamma / 2.0
    c_uv = tau * params.kappa2 * d / h2 + tau * params.mu**2 / 2.0
    det = 1.0 + (tau / 2.0) * c_uv
    if det == 0.0:
        raise ValueError(f"singular U-V system: 1 + (tau/2)*c_uv = 0 at tau={tau}")
    uv_inv = ((1.0 / det, (tau / 2.0) / det),
              (-c_uv / det, 1.0 / det))
    return StepCoefficients(tau, alpha, beta, gcoef, c_uv,
                            tau * params.kappa2 / h2, tau * params.gamma, uv_inv)


@lru_cache(maxsize=8)
def _nbr_table(grid: GridSpec) -> np.ndarray:
    return grid.neighbor_table()


def update_point_base(state: FieldState, i: int, coeffs: StepCoefficients,
                      grid: GridSpec) -> None:
    """Apply the base kernel at a single point, in place."""
    order = np.array([i], dtype=np.int64)
    kernels.sweep_base(state.P, state.Q, state.U, state.V,
                       _nbr_table(grid), order, *coeffs.kernel_args())


def update_point_adjoint(state: FieldState, i: int, coeffs: StepCoefficients,
                         grid: GridSpec) -> None:
    """Apply the adjoint kernel at a single point, in place."""
    order = np.array([i], dtype=np.int64)
    kernels.sweep_adjoint(state.P, state.Q, state.U, state.V,
                          _nbr_table(grid), order, *coeffs.kernel_args())


def _lane_fn(state: FieldState, coeffs: StepCoefficients, grid: GridSpec,
             sweep) -> "callable":
    nbrs = _nbr_table(grid)
    P, Q, U, V = state.P, state.Q, state.U, state.V
    args = coeffs.kernel_args()

    def run_lane(order: np.ndarray) -> None:
        sweep(P, Q, U, V, nbrs, order, *args)

    return run_lane


def _check(schedule: UpdateSchedule, grid: GridSpec) -> None:
    if not schedule.validated:
        report = validate_schedule(schedule, grid)
        if report is not None:
            raise ValueError(f"invalid schedule: {report}")


def step_base(state: FieldState, schedule: UpdateSchedule,
              coeffs: StepCoefficients, executor, grid: GridSpec) -> None:
    """One base sweep over all points; advances state.t by coeffs.tau."""
    _check(schedule, grid)
    executor.run(schedule, _lane_fn(state, coeffs, grid, kernels.sweep_base))
    state.t += coeffs.tau


def step_adjoint(state: FieldState, schedule: UpdateSchedule,
                 coeffs: StepCoefficients, executor, grid: GridSpec) -> None:
    """One adjoint sweep, along the reversed schedule; advances t by tau."""
    _check(schedule, grid)
    executor.run(reverse_schedule(schedule),
                 _lane_fn(state, coeffs, grid, kernels.sweep_adjoint))
    state.t += coeffs.tau


def step_dpavf2(state: FieldState, schedule: UpdateSchedule,
                coeffs_half: StepCoefficients, executor,
                grid: GridSpec) -> None:
    """Symmetric composition: base then adjoint, each at tau/2."""
    step_base(state, schedule, coeffs_half, executor, grid)
    step_adjoint(state, schedule, coeffs_half, executor, grid)


@dataclass
class EnergyTrace:
    """Per-record energy bookkeeping along an integration."""

    steps: list
    times: list
    energy: list
    rel_error: list
    mass: list
    re_is_absolute: bool = False  # set when |E0| underflows the RE ratio

    def max_rel_error(self) -> float:
        return max(self.rel_error)


def integrate(state: FieldState, grid: GridSpec, params: PhysParams,
              schedule: UpdateSchedule, executor, tau: float, T: float,
              record_stride: int = 1, snapshot_stride: int = 0,
              snapshot_writer=None) -> EnergyTrace:
    """Run ceil(T/tau) composed steps, recording energy and mass.

    The relative energy error is |E_n - E_0| / |E_0|; when E_0 underflows
    the quotient the absolute drift is recorded instead and flagged.
    """
    if tau <= 0 or T < 0:
        raise ValueError(f"need tau > 0 and T >= 0, got tau={tau}, T={T}")
    if record_stride < 1:
        raise ValueError("record_stride must be >= 1")
    n_steps = int(math.ceil(T / tau - 1e-12)) if T > 0 else 0
    coeffs_half = precompute_coefficients(params, tau / 2.0, grid)

    e0 = discrete_energy(state, params, grid)
    absolute = abs(e0) < 1e-300
    trace = EnergyTrace([0], [state.t], [e0], [0.0],
                        [mass(state, grid)], re_is_absolute=absolute)
    for n in range(1, n_steps + 1):
        step_dpavf2(state, schedule, coeffs_half, executor, grid)
        if not state.is_finite():
            raise FloatingPointError(
                f"non-finite field values detected after step {n} (t={state.t})")
        if n % record_stride == 0:
            e = discrete_energy(state, params, grid)
            re = abs(e - e0) if absolute else abs(e - e0) / abs(e0)
            trace.steps.append(n)
            trace.times.append(state.t)
            trace.energy.append(e)
            trace.rel_error.append(re)
            trace.mass.append(mass(state, grid))
        if snapshot_stride and snapshot_writer and n % snapshot_stride == 0:
            snapshot_writer(state, n)
    return trace
