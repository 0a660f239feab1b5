"""Update schedules: grid-point permutations plus phase plans.

A schedule fixes the grid-point ordering that parameterizes the
discrete-gradient sweep, and groups the points into phases.  Phases run
strictly in sequence; within a parallel phase the lanes may run
concurrently.  Safety rule for a parallel phase: lanes write disjoint
points and no lane's stencil reads a point written by another lane of the
same phase.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import prng
from .grid import GridSpec

STRATEGIES = ("lexicographic-forward", "lexicographic-reverse",
              "seeded-random", "block-split", "checkerboard")


@dataclass
class Phase:
    parallel: bool
    lanes: list  # list of int64 index arrays, each in execution order


@dataclass
class UpdateSchedule:
    strategy: str
    rank: np.ndarray          # rank[i] = position of point i in the sweep
    phases: list
    seed: int | None = None
    workers: int | None = None
    validated: bool = False
    _reversed: "UpdateSchedule | None" = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return self.rank.shape[0]

    def serial_order(self) -> np.ndarray:
        """Indices in serial sweep order (inverse of rank)."""
        order = np.empty(self.M, dtype=np.int64)
        order[self.rank] = np.arange(self.M, dtype=np.int64)
        return order


def _order_to_rank(order: np.ndarray) -> np.ndarray:
    rank = np.empty(order.shape[0], dtype=np.int64)
    rank[order] = np.arange(order.shape[0], dtype=np.int64)
    return rank


def lexicographic_schedule(grid: GridSpec, forward: bool = True) -> UpdateSchedule:
    """Single serial phase sweeping the linearization forward or backward."""
    order = np.arange(grid.M, dtype=np.int64)
    if not forward:
        order = order[::-1].copy()
    tag = "lexicographic-forward" if forward else "lexicographic-reverse"
    return UpdateSchedule(tag, _order_to_rank(order), [Phase(False, [order])],
                          validated=True)


def random_schedule(grid: GridSpec, seed: int) -> UpdateSchedule:
    """Single serial phase along a seeded Fisher-Yates permutation."""
    order = prng.permutation(grid.M, seed)
    return UpdateSchedule("seeded-random", _order_to_rank(order),
                          [Phase(False, [order])], seed=seed, validated=True)


def _slab(grid: GridSpec, j: int) -> np.ndarray:
    """Linear indices of the j-th slab along the first (slowest) axis."""
    L = grid.N**(grid.d - 1)
    return np.arange(j * L, (j + 1) * L, dtype=np.int64)


def block_split_schedule(grid: GridSpec, workers: int) -> UpdateSchedule:
    """Boundary slab, then worker-owned blocks, then separator slabs.

    The first axis is split into: slab 0 (serial), `workers` contiguous
    blocks (parallel, one lane each) and one single-slab separator after
    each block (serial, ascending).  Separator width one slab is enough
    for the radius-1 stencil, so no block reads another block's writes.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n_min = 3 * workers + 1
    if grid.N < n_min:
        raise ValueError(
            f"block-split with {workers} workers needs N >= {n_min}, got N={grid.N}")
    W = workers
    total_block_slabs = grid.N - 1 - W
    base, rem = divmod(total_block_slabs, W)

    boundary = _slab(grid, 0)
    blocks, seps = [], []
    pos = 1
    for l in range(W):
        size = base + (1 if l < rem else 0)
        blocks.append(np.concatenate([_slab(grid, pos + s) for s in range(size)]))
        pos += size
        seps.append(_slab(grid, pos))
        pos += 1
    assert pos == grid.N

    phases = [Phase(False, [boundary]), Phase(True, blocks), Phase(False, seps)]
    order = np.concatenate([boundary] + blocks + seps)
    return UpdateSchedule("block-split", _order_to_rank(order), phases,
                          workers=workers, validated=True)


def checkerboard_schedule(grid: GridSpec, workers: int = 1) -> UpdateSchedule:
    """Two parallel phases: odd-parity ("red") points, then the rest.

    Same-color points share no stencil edge, so the lane striping within a
    phase is free; each color is cut into `workers` contiguous chunks.
    """
    if grid.N % 2 != 0:
        raise ValueError(
            f"checkerboard needs even N for a consistent periodic 2-coloring, got N={grid.N}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    coords = np.indices(grid.shape)
    parity = coords.sum(axis=0).ravel() % 2
    red = np.nonzero(parity == 1)[0].astype(np.int64)
    blue = np.nonzero(parity == 0)[0].astype(np.int64)

    def stripe(idx: np.ndarray) -> list:
        return [lane for lane in np.array_split(idx, workers) if lane.size]

    phases = [Phase(True, stripe(red)), Phase(True, stripe(blue))]
    order = np.concatenate([red, blue])
    return UpdateSchedule("checkerboard", _order_to_rank(order), phases,
                          workers=workers, validated=True)


def reverse_schedule(s: UpdateSchedule) -> UpdateSchedule:
    """Mirror the sweep: phases, lanes and in-lane orders all reversed."""
    if s._reversed is not None:
        return s._reversed
    phases = [Phase(p.parallel, [lane[::-1].copy() for lane in reversed(p.lanes)])
              for p in reversed(s.phases)]
    rev = UpdateSchedule(s.strategy, (s.M - 1 - s.rank), phases,
                         seed=s.seed, workers=s.workers, validated=s.validated)
    rev._reversed = s
    s._reversed = rev
    return rev


def validate_schedule(s: UpdateSchedule, grid: GridSpec) -> str | None:
    """Return None if the schedule is valid, else a violation report."""
    s.validated = False
    M = grid.M
    if s.rank.shape[0] != M:
        return f"rank has {s.rank.shape[0]} entries, grid has {M} points"

    lanes_flat = np.concatenate([lane for p in s.phases for lane in p.lanes]) \
        if s.phases else np.empty(0, dtype=np.int64)
    if lanes_flat.shape[0] != M:
        return f"phase plan covers {lanes_flat.shape[0]} points, expected {M}"
    counts = np.bincount(lanes_flat, minlength=M)
    if counts.max(initial=0) > 1:
        dup = int(np.argmax(counts > 1))
        return f"coverage violation: index {dup} appears {counts[dup]} times"
    if counts.min(initial=1) < 1:
        miss = int(np.argmin(counts))
        return f"coverage violation: index {miss} never updated"

    if not np.array_equal(np.sort(s.rank), np.arange(M)):
        return "rank is not a permutation of 0..M-1"

    # Phase plan consistency with the rank linearization.
    offset = 0
    nbrs = grid.neighbor_table()
    for pi, phase in enumerate(s.phases):
        size = sum(lane.shape[0] for lane in phase.lanes)
        if not phase.parallel:
            seq = np.concatenate(phase.lanes)
            expected = np.arange(offset, offset + size)
            if not np.array_equal(s.rank[seq], expected):
                bad = int(np.argmax(s.rank[seq] != expected))
                return (f"rank inconsistent with serial phase {pi} at index "
                        f"{int(seq[bad])}")
        else:
            lane_of = np.full(M, -1, dtype=np.int64)
            for li, lane in enumerate(phase.lanes):
                r = s.rank[lane]
                if r.min(initial=offset) < offset or r.max(initial=offset) >= offset + size:
                    return f"rank inconsistent with parallel phase {pi} lane {li}"
                if lane.shape[0] > 1 and not np.all(np.diff(r) > 0):
                    return f"rank not increasing along phase {pi} lane {li}"
                lane_of[lane] = li
            # Stencil safety: no cross-lane neighbor inside the phase.
            pts = np.concatenate(phase.lanes)
            nn = nbrs[pts]
            other = (lane_of[nn] >= 0) & (lane_of[nn] != lane_of[pts][:, None])
            if other.any():
                r, c = np.nonzero(other)
                i, j = int(pts[r[0]]), int(nn[r[0], c[0]])
                return (f"phase-safety violation in phase {pi}: point {i} "
                        f"reads point {j} owned by another lane")
        offset += size
    s.validated = True
    return None
