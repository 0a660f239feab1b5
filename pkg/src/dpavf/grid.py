"""Periodic grid geometry, field storage and the semi-discrete system.

The spatial discretization is the standard second-order central difference
on a uniform periodic grid in d = 1, 2 or 3 dimensions.  Fields are stored
flat, with the fixed linearization ``i = x*N**(d-1) + y*N**(d-2) + ...``
(0-based, first axis slowest).  All field-level operations here are
read-only and matrix-free; stencils realize the Laplacian.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic Cartesian grid, same endpoints and N per axis."""

    d: int
    a: float
    b: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if self.N < 2:
            raise ValueError(f"need N >= 2, got N={self.N}")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N

    @property
    def M(self) -> int:
        return self.N**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    def axis_coords(self) -> np.ndarray:
        """Node coordinates along one axis: a + j*h for j = 0..N-1."""
        return self.a + self.h * np.arange(self.N)

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """d coordinate arrays of shape ``self.shape`` ('ij' indexing)."""
        x = self.axis_coords()
        return np.meshgrid(*([x] * self.d), indexing="ij")

    def neighbor_table(self) -> np.ndarray:
        """(M, 2d) table of periodic axis neighbors in canonical order.

        Column order per axis: (-x, +x, -y, +y, -z, +z) truncated to d.
        """
        idx = np.arange(self.M, dtype=np.int64).reshape(self.shape)
        cols = []
        for ax in range(self.d):
            cols.append(np.roll(idx, 1, axis=ax).ravel())   # minus neighbor
            cols.append(np.roll(idx, -1, axis=ax).ravel())  # plus neighbor
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class PhysParams:
    """Physical constants of the coupled nucleon/meson system."""

    kappa1: float = 1.0
    kappa2: float = 1.0
    mu: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("kappa1", "kappa2", "mu", "gamma"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass
class FieldState:
    """The four real scalar fields (Psi = P + iQ, meson U, velocity V)."""

    P: np.ndarray
    Q: np.ndarray
    U: np.ndarray
    V: np.ndarray
    t: float = 0.0

    @classmethod
    def zeros(cls, grid: GridSpec) -> "FieldState":
        M = grid.M
        return cls(np.zeros(M), np.zeros(M), np.zeros(M), np.zeros(M), 0.0)

    def copy(self) -> "FieldState":
        return FieldState(self.P.copy(), self.Q.copy(), self.U.copy(),
                          self.V.copy(), self.t)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.P).all() and np.isfinite(self.Q).all()
                    and np.isfinite(self.U).all() and np.isfinite(self.V).all())


def neighbor_indices(grid: GridSpec, i: int) -> list[int]:
    """The 2d periodic axis neighbors of linear index i, canonical order."""
    if not 0 <= i < grid.M:
        raise IndexError(f"linear index {i} out of range for M={grid.M}")
    N = grid.N
    coords = []
    rest = i
    for _ in range(grid.d):
        coords.append(rest % N)
        rest //= N
    coords.reverse()  # coords[0] is the slowest axis
    out = []
    strides = [N**(grid.d - 1 - ax) for ax in range(grid.d)]
    for ax in range(grid.d):
        for step in (-1, 1):
            c = (coords[ax] + step) % N
            out.append(i + (c - coords[ax]) * strides[ax])
    return out


def laplacian_at(field: np.ndarray, grid: GridSpec, i: int) -> float:
    """Central-difference Laplacian of a flat field at one point."""
    s = 0.0
    for j in neighbor_indices(grid, i):
        s += field[j]
    return (s - 2 * grid.d * field[i]) / grid.h**2


def laplacian(field: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Central-difference Laplacian of the whole field (vectorized)."""
    f = field.reshape(grid.shape)
    out = -2.0 * grid.d * f
    for ax in range(grid.d):
        out = out + np.roll(f, 1, axis=ax) + np.roll(f, -1, axis=ax)
    return (out / grid.h**2).ravel()


def inner_product(Uf: np.ndarray, Vf: np.ndarray, grid: GridSpec) -> float:
    """Discrete L2 inner product: h^d * sum_i Uf[i]*Vf[i]."""
    return grid.h**grid.d * float(np.dot(Uf, Vf))


def norm(Uf: np.ndarray, grid: GridSpec) -> float:
    return float(np.sqrt(inner_product(Uf, Uf, grid)))


def _grad_sq_sum(field: np.ndarray, grid: GridSpec) -> float:
    """Unscaled sum of squared forward differences over all axes.

    Equals -f^T D f for the periodic Laplacian matrix D (summation by
    parts), without the h^d measure.
    """
    f = field.reshape(grid.shape)
    total = 0.0
    for ax in range(grid.d):
        diff = (np.roll(f, -1, axis=ax) - f) / grid.h
        total += float(np.sum(diff * diff))
    return total


def discrete_energy(state: FieldState, params: PhysParams,
                    grid: GridSpec) -> float:
    """Scaled discrete energy h^d * E_raw (see :func:`raw_energy`)."""
    return grid.h**grid.d * raw_energy(state, params, grid)


def raw_energy(state: FieldState, params: PhysParams,
               grid: GridSpec) -> float:
    """Unscaled energy whose gradient drives the Hamiltonian system."""
    quad = (params.kappa1 * _grad_sq_sum(state.P, grid)
            + params.kappa1 * _grad_sq_sum(state.Q, grid)
            + params.kappa2 * _grad_sq_sum(state.U, grid)
            + float(np.dot(state.V, state.V))
            + params.mu**2 * float(np.dot(state.U, state.U)))
    coupling = float(np.dot(state.P * state.P + state.Q * state.Q, state.U))
    return 0.5 * quad - params.gamma * coupling


def mass(state: FieldState, grid: GridSpec) -> float:
    """Discrete mass ||Psi||_h^2 (diagnostic; not asserted conserved)."""
    return grid.h**grid.d * float(np.dot(state.P, state.P)
                                  + np.dot(state.Q, state.Q))


def energy_gradient(state: FieldState, params: PhysParams,
                    grid: GridSpec) -> tuple[np.ndarray, ...]:
    """Gradient of the unscaled energy with respect to (P, Q, U, V)."""
    lap_p = laplacian(state.P, grid)
    lap_q = laplacian(state.Q, grid)
    lap_u = laplacian(state.U, grid)
    gp = -params.kappa1 * lap_p - 2.0 * params.gamma * state.U * state.P
    gq = -params.kappa1 * lap_q - 2.0 * params.gamma * state.U * state.Q
    gu = (-params.kappa2 * lap_u + params.mu**2 * state.U
          - params.gamma * (state.P * state.P + state.Q * state.Q))
    gv = state.V.copy()
    return gp, gq, gu, gv


def rhs_semi_discrete(state: FieldState, params: PhysParams,
                      grid: GridSpec) -> tuple[np.ndarray, ...]:
    """Time derivative (Pdot, Qdot, Udot, Vdot) of the semi-discrete system.

    Equals S * energy_gradient with S the constant skew matrix carrying
    +-1/2 blocks on the (P, Q) pair and +-1 blocks on the (U, V) pair.
    """
    gp, gq, gu, gv = energy_gradient(state, params, grid)
    return 0.5 * gq, -0.5 * gp, gv, -gu
