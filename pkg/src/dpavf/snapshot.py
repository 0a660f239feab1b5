"""Bit-exact binary snapshot format.

Layout (all little-endian):
  bytes 0-3   magic  b"KGS1"
  u32         version (1)
  u32         dimension d
  u32         points per axis N
  f64         a, b, t
  f64 arrays  P, Q, U, V, each N^d values in the repo linearization

Total size: 4 + 4*3 + 8*3 + 4*8*N^d bytes.
"""
from __future__ import annotations

import struct

import numpy as np

from .grid import FieldState, GridSpec

MAGIC = b"KGS1"
VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")


def snapshot_size(grid: GridSpec) -> int:
    return _HEADER.size + 4 * 8 * grid.M


def write_snapshot(state: FieldState, grid: GridSpec, path) -> None:
    try:
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, VERSION, grid.d, grid.N,
                                  grid.a, grid.b, state.t))
            for field in (state.P, state.Q, state.U, state.V):
                fh.write(np.ascontiguousarray(field, dtype="<f8").tobytes())
    except OSError as exc:
        raise OSError(f"snapshot write failed for {path}: {exc}") from exc


def read_snapshot(path) -> tuple[FieldState, GridSpec]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise OSError(f"snapshot read failed for {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise ValueError(f"snapshot {path} truncated: {len(raw)} bytes")
    magic, version, d, N, a, b, t = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"snapshot {path} has bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"snapshot {path} has unsupported version {version}")
    grid = GridSpec(d, a, b, N)
    if len(raw) != snapshot_size(grid):
        raise ValueError(
            f"snapshot {path} has {len(raw)} bytes, expected {snapshot_size(grid)}")
    fields = []
    off = _HEADER.size
    for _ in range(4):
        arr = np.frombuffer(raw, dtype="<f8", count=grid.M, offset=off)
        fields.append(arr.astype(np.float64))
        off += 8 * grid.M
    return FieldState(*fields, t=t), grid
