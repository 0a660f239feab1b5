"""Named initial-condition presets and seeded random states.

Each preset fixes its dimension, domain and default physical constants
and builds the four fields from grid-node coordinates.  The generators
are smooth and rapidly decaying, so the periodic wrap mismatch on the
standard (-10, 10)^d domains sits below double-precision noise (tanh and
the Gaussians saturate long before the boundary).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import prng
from .grid import FieldState, GridSpec, PhysParams


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    dimension: int
    a: float
    b: float
    params: PhysParams
    builder: Callable[[GridSpec], FieldState]

    def default_grid(self, N: int) -> GridSpec:
        return GridSpec(self.dimension, self.a, self.b, N)

    def state(self, grid: GridSpec) -> FieldState:
        if grid.d != self.dimension:
            raise ValueError(
                f"scenario {self.name!r} is {self.dimension}D, got a {grid.d}D grid")
        return self.builder(grid)


def preset_gaussian2d(grid: GridSpec) -> FieldState:
    """Single Gaussian pulse: psi0=(1+i)e^{-r^2}, u0=tanh(r^2),
    v0=sin(x+y)e^{-2 r^2}."""
    _require_dim(grid, 2, "gaussian2d")
    X, Y = grid.meshgrid()
    r2 = X**2 + Y**2
    g = np.exp(-r2)
    return FieldState(g.ravel().copy(), g.ravel().copy(),
                      np.tanh(r2).ravel(),
                      (np.sin(X + Y) * np.exp(-2.0 * r2)).ravel(), 0.0)


_FOURPEAK_CENTERS = ((0.0, -3.0), (3.0, 0.0), (0.0, 3.0), (-3.0, 0.0))


def preset_fourpeak2d(grid: GridSpec) -> FieldState:
    """Four Gaussian peaks at (0,+-3), (+-3,0); u0 a sum of tanh bumps;
    v0 a central Gaussian."""
    _require_dim(grid, 2, "fourpeak2d")
    X, Y = grid.meshgrid()
    P = np.zeros(grid.shape)
    U = np.zeros(grid.shape)
    for cx, cy in _FOURPEAK_CENTERS:
        s2 = (X - cx)**2 + (Y - cy)**2
        P += np.exp(-s2)
        U += np.tanh(s2)
    return FieldState(P.ravel().copy(), P.ravel().copy(), U.ravel(),
                      np.exp(-X**2 - Y**2).ravel(), 0.0)


def preset_ellipsoids3d(grid: GridSpec) -> FieldState:
    """Two shifted 3D Gaussians for psi0 (with the real exponential tilt
    e^{0.01 j (x+y+z)}, j = 0, 1 — see the note below), three Gaussian
    bumps for u0, central Gaussian for v0.

    The tilt exponent is real as written in the source formulas, so the
    whole psi0 is real and Q is identically zero.  A complex-phase
    reading e^{0.01 i j (x+y+z)} would change only the j=1 term; the
    literal real form is implemented.
    """
    _require_dim(grid, 3, "ellipsoids3d")
    X, Y, Z = grid.meshgrid()
    P = np.zeros(grid.shape)
    for j in (0, 1):
        P += (np.exp(-(X + 2.0 * (-1.0)**j)**2 - Y**2 - Z**2)
              * np.exp(0.01 * j * (X + Y + Z)))
    U = np.exp(-X**2 - Y**2 - (Z - 2.0)**2)
    for j in (0, 1):
        U += np.exp(-(X + (-1.0)**j * np.sqrt(3.0))**2 - Y**2 - (Z + 1.0)**2)
    return FieldState(P.ravel(), np.zeros(grid.M), U.ravel(),
                      np.exp(-X**2 - Y**2 - Z**2).ravel(), 0.0)


def seeded_random_state(grid: GridSpec, seed: int,
                        amplitude: float) -> FieldState:
    """Uniform fields in [-amplitude, amplitude], deterministic per seed."""
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    flat = prng.uniform_array(4 * grid.M, seed, -amplitude, amplitude)
    M = grid.M
    return FieldState(flat[:M].copy(), flat[M:2 * M].copy(),
                      flat[2 * M:3 * M].copy(), flat[3 * M:].copy(), 0.0)


def _require_dim(grid: GridSpec, d: int, name: str) -> None:
    if grid.d != d:
        raise ValueError(f"scenario {name!r} requires a {d}D grid, got d={grid.d}")


SCENARIOS = {
    "gaussian2d": ScenarioSpec("gaussian2d", 2, -10.0, 10.0,
                               PhysParams(1.0, 1.0, 1.0, 1.0),
                               preset_gaussian2d),
    "fourpeak2d": ScenarioSpec("fourpeak2d", 2, -10.0, 10.0,
                               PhysParams(0.5, 0.5, 0.5, 0.5),
                               preset_fourpeak2d),
    "ellipsoids3d": ScenarioSpec("ellipsoids3d", 3, -10.0, 10.0,
                                 PhysParams(-0.4, 0.1, 0.1, 0.2),
                                 preset_ellipsoids3d),
}


def get_scenario(name: str) -> ScenarioSpec:
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ValueError(f"unknown scenario {name!r}; known: {known}") from None
