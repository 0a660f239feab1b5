"""Structure-preserving Klein-Gordon-Schrodinger solver.

Energy-conserving discrete-gradient time integration with pointwise
explicit in-place sweeps, pluggable grid-point update orders and a
deterministic phased parallel executor.
"""
from .executor import ExecutorConfig, PhasedExecutor, SerialExecutor
from .grid import (FieldState, GridSpec, PhysParams, discrete_energy,
                   energy_gradient, inner_product, laplacian, laplacian_at,
                   mass, neighbor_indices, norm, rhs_semi_discrete)
from .integrator import (EnergyTrace, StepCoefficients, integrate,
                         precompute_coefficients, step_adjoint, step_base,
                         step_dpavf2, update_point_adjoint, update_point_base)
from .ordering import (UpdateSchedule, block_split_schedule,
                       checkerboard_schedule, lexicographic_schedule,
                       random_schedule, reverse_schedule, validate_schedule)
from .scenarios import (SCENARIOS, ScenarioSpec, get_scenario,
                        preset_ellipsoids3d, preset_fourpeak2d,
                        preset_gaussian2d, seeded_random_state)
from .snapshot import read_snapshot, snapshot_size, write_snapshot

__all__ = [
    "ExecutorConfig", "PhasedExecutor", "SerialExecutor",
    "FieldState", "GridSpec", "PhysParams", "discrete_energy",
    "energy_gradient", "inner_product", "laplacian", "laplacian_at", "mass",
    "neighbor_indices", "norm", "rhs_semi_discrete",
    "EnergyTrace", "StepCoefficients", "integrate",
    "precompute_coefficients", "step_adjoint", "step_base", "step_dpavf2",
    "update_point_adjoint", "update_point_base",
    "UpdateSchedule", "block_split_schedule", "checkerboard_schedule",
    "lexicographic_schedule", "random_schedule", "reverse_schedule",
    "validate_schedule",
    "SCENARIOS", "ScenarioSpec", "get_scenario", "preset_ellipsoids3d",
    "preset_fourpeak2d", "preset_gaussian2d", "seeded_random_state",
    "read_snapshot", "snapshot_size", "write_snapshot",
]

__version__ = "1.0.0"
