"""Independent brute-force reference implementations, for tests only.

Nothing here is on a production path.  The sweeps below deliberately
re-derive the neighbor old/new selection from the schedule's rank array
(two buffers) instead of updating in place, and the dense energy builds
the full difference matrix.  Per-point arithmetic mirrors the compiled
kernels expression by expression so comparisons can demand bitwise
equality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (FieldState, GridSpec, PhysParams, discrete_energy,
                   rhs_semi_discrete)
from .integrator import StepCoefficients
from .ordering import UpdateSchedule


@dataclass
class ReferenceSolution:
    """High-resolution reference trajectory endpoint on the same grid."""

    state: FieldState
    tau_ref: float
    method: str
    energy_drift: float  # |E(T) - E(0)| / max(|E(0)|, 1), not conserved exactly


def rk4_reference(state0: FieldState, params: PhysParams, grid: GridSpec,
                  tau_ref: float, T: float) -> ReferenceSolution:
    """Classical 4-stage Runge-Kutta on the semi-discrete system."""
    if tau_ref <= 0:
        raise ValueError("tau_ref must be positive")
    n_steps = int(round(T / tau_ref))
    s = state0.copy()
    e0 = discrete_energy(s, params, grid)

    def f(P, Q, U, V):
        return rhs_semi_discrete(FieldState(P, Q, U, V, 0.0), params, grid)

    for n in range(n_steps):
        y = (s.P, s.Q, s.U, s.V)
        k1 = f(*y)
        k2 = f(*(a + 0.5 * tau_ref * b for a, b in zip(y, k1)))
        k3 = f(*(a + 0.5 * tau_ref * b for a, b in zip(y, k2)))
        k4 = f(*(a + tau_ref * b for a, b in zip(y, k3)))
        s.P, s.Q, s.U, s.V = (
            a + (tau_ref / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4))
        s.t += tau_ref
        if not s.is_finite():
            raise FloatingPointError(
                f"reference integration produced non-finite values at step {n + 1}")
    e1 = discrete_energy(s, params, grid)
    drift = abs(e1 - e0) / max(abs(e0), 1.0)
    return ReferenceSolution(s, tau_ref, "rk4", drift)


def _point_base(Pi, Qi, Ui, Vi, SP, SQ, SU, c: StepCoefficients):
    """Base update of one point; mirrors the compiled kernel bit for bit."""
    (i00, i01), (i10, i11) = c.uv_inv
    cr = c.gcoef * Ui - c.alpha
    rr = -cr * Pi - Qi - c.beta * SP
    ri = Pi - cr * Qi - c.beta * SQ
    den = cr * cr + 1.0
    Pn = (rr * cr + ri) / den
    Qn = (ri * cr - rr) / den
    half_tau = c.tau / 2.0
    r1 = Ui + half_tau * Vi
    r2 = Vi - c.c_uv * Ui + c.uv_nbr * SU + c.gU * (Pn * Pn + Qn * Qn)
    return Pn, Qn, i00 * r1 + i01 * r2, i10 * r1 + i11 * r2


def _point_adjoint(Pi, Qi, Ui, Vi, SP, SQ, SU, c: StepCoefficients):
    """Adjoint update of one point; mirrors the compiled kernel bit for bit."""
    (i00, i01), (i10, i11) = c.uv_inv
    half_tau = c.tau / 2.0
    r1 = Ui + half_tau * Vi
    r2 = Vi - c.c_uv * Ui + c.uv_nbr * SU + c.gU * (Pi * Pi + Qi * Qi)
    Un = i00 * r1 + i01 * r2
    Vn = i10 * r1 + i11 * r2
    cr = c.gcoef * Un - c.alpha
    rr = -cr * Pi - Qi - c.beta * SP
    ri = Pi - cr * Qi - c.beta * SQ
    den = cr * cr + 1.0
    return (rr * cr + ri) / den, (ri * cr - rr) / den, Un, Vn


def explicit_superscript_sweep(state: FieldState, schedule: UpdateSchedule,
                               coeffs: StepCoefficients, grid: GridSpec,
                               adjoint: bool = False) -> FieldState:
    """Two-buffer sweep that resolves old/new neighbor reads from rank.

    Base: a neighbor contributes its updated value iff its rank is lower.
    Adjoint: iff its rank is higher (the sweep runs in descending rank).
    Returns the updated buffer; the input state is untouched.
    """
    rank = schedule.rank
    oldP, oldQ = state.P.copy(), state.Q.copy()
    oldU, oldV = state.U.copy(), state.V.copy()
    newP, newQ = state.P.copy(), state.Q.copy()
    newU, newV = state.U.copy(), state.V.copy()
    nbrs = grid.neighbor_table()
    order = schedule.serial_order()
    if adjoint:
        order = order[::-1]
    point = _point_adjoint if adjoint else _point_base
    for i in order:
        ri = rank[i]
        SP = 0.0
        SQ = 0.0
        SU = 0.0
        for j in nbrs[i]:
            done = rank[j] > ri if adjoint else rank[j] < ri
            if done:
                SP += newP[j]
                SQ += newQ[j]
                SU += newU[j]
            else:
                SP += oldP[j]
                SQ += oldQ[j]
                SU += oldU[j]
        newP[i], newQ[i], newU[i], newV[i] = point(
            oldP[i], oldQ[i], oldU[i], oldV[i], SP, SQ, SU, coeffs)
    return FieldState(newP, newQ, newU, newV, state.t + coeffs.tau)


def two_phase_checkerboard(state: FieldState, coeffs: StepCoefficients,
                           grid: GridSpec) -> FieldState:
    """Whole-field base step: all red points from old data, then all blue.

    No per-point ordering appears anywhere; red neighbors of a blue point
    already hold updated values because the colors alternate.
    """
    if grid.N % 2 != 0:
        raise ValueError("checkerboard pass needs even N")
    parity = np.indices(grid.shape).sum(axis=0).ravel() % 2
    red = np.nonzero(parity == 1)[0]
    blue = np.nonzero(parity == 0)[0]
    nbrs = grid.neighbor_table()

    oldP, oldQ = state.P.copy(), state.Q.copy()
    oldU, oldV = state.U.copy(), state.V.copy()
    bufP, bufQ = state.P.copy(), state.Q.copy()
    bufU, bufV = state.U.copy(), state.V.copy()

    for i in red:  # neighbors are all blue: read the untouched old fields
        SP = 0.0
        SQ = 0.0
        SU = 0.0
        for j in nbrs[i]:
            SP += oldP[j]
            SQ += oldQ[j]
            SU += oldU[j]
        bufP[i], bufQ[i], bufU[i], bufV[i] = _point_base(
            oldP[i], oldQ[i], oldU[i], oldV[i], SP, SQ, SU, coeffs)
    for i in blue:  # neighbors are all red: read the updated buffer
        SP = 0.0
        SQ = 0.0
        SU = 0.0
        for j in nbrs[i]:
            SP += bufP[j]
            SQ += bufQ[j]
            SU += bufU[j]
        bufP[i], bufQ[i], bufU[i], bufV[i] = _point_base(
            bufP[i], bufQ[i], bufU[i], bufV[i], SP, SQ, SU, coeffs)
    return FieldState(bufP, bufQ, bufU, bufV, state.t + coeffs.tau)


def dense_laplacian_matrix(grid: GridSpec) -> np.ndarray:
    """Dense periodic difference matrix D (Kronecker construction)."""
    if grid.M > 4096:
        raise ValueError(f"dense matrix refused for M={grid.M} > 4096")
    N = grid.N
    D2 = np.zeros((N, N))
    for j in range(N):
        D2[j, j] -= 2.0
        D2[j, (j - 1) % N] += 1.0
        D2[j, (j + 1) % N] += 1.0
    D = np.zeros((grid.M, grid.M))
    eye = np.eye(N)
    for ax in range(grid.d):
        factors = [eye] * grid.d
        factors[ax] = D2
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        D += term
    return D / grid.h**2


def dense_energy(state: FieldState, params: PhysParams,
                 grid: GridSpec) -> float:
    """Energy via the dense difference matrix, scaled by h^d."""
    D = dense_laplacian_matrix(grid)
    p, q, u, v = state.P, state.Q, state.U, state.V
    quad = (-params.kappa1 * p @ D @ p - params.kappa1 * q @ D @ q
            - params.kappa2 * u @ D @ u + v @ v + params.mu**2 * (u @ u))
    cubic = (p * p + q * q) @ u
    return grid.h**grid.d * (0.5 * float(quad) - params.gamma * float(cubic))
