"""Reading and writing fields in the KSF1 binary format.

Layout, bit-exact: bytes 0-3 are the ASCII magic ``KSF1``; then four
little-endian uint32 values d, M, N, reserved (must be 0); then N**d
IEEE-754 little-endian float64 samples in row-major order, last axis
fastest.  The header carries the full grid geometry, so a file can be
loaded without any side channel.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import Field, Grid, make_grid

MAGIC = b"KSF1"
_HEADER = struct.Struct("<IIII")


def write_field(path, field: Field) -> None:
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(g.d, g.M, g.N, 0))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field(path, grid: Grid | None = None) -> Field:
    """Load a field; if ``grid`` is given the file must match it exactly."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < len(MAGIC) + _HEADER.size or raw[: len(MAGIC)] != MAGIC:
        raise ValueError(f"{path}: not a KSF1 file")
    d, m, n, reserved = _HEADER.unpack_from(raw, len(MAGIC))
    if reserved != 0:
        raise ValueError(f"{path}: reserved header word must be 0")
    if d < 1 or m < 1 or n < 2:
        raise ValueError(f"{path}: invalid geometry d={d} M={m} N={n}")
    payload = raw[len(MAGIC) + _HEADER.size :]
    expected = n**d * 8
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, expected {expected}"
        )
    if grid is None:
        grid = make_grid(d, m, n)
    elif (grid.d, grid.M, grid.N) != (d, m, n):
        raise ValueError(
            f"{path}: geometry ({d},{m},{n}) does not match the target grid"
        )
    vals = np.frombuffer(payload, dtype="<f8").reshape(grid.shape).astype(np.float64)
    return Field(grid, vals)
