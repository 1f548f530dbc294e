"""FLD1 binary field files.

Layout (little-endian): magic b"FLD1", version u32 = 1, n_x n_y n_z as u32,
l_x l_y l_z as f64, alpha as f64, then n_x*n_y*n_z f64 samples with the
x index varying fastest.  Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .spectral import GridSpec, RealField

__all__ = ["FieldFormatError", "write_field", "read_field", "MAGIC", "VERSION"]

MAGIC = b"FLD1"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIdddd")


class FieldFormatError(Exception):
    """Raised when a field file violates the FLD1 layout."""


def write_field(path, field: RealField) -> None:
    grid = field.grid
    header = _HEADER.pack(MAGIC, VERSION, *grid.n, *grid.l, grid.alpha)
    payload = np.ascontiguousarray(field.flat_x_fastest(), dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path) -> RealField:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise FieldFormatError(f"file too short for FLD1 header ({len(raw)} bytes)")
    magic, version, nx, ny, nz, lx, ly, lz, alpha = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FieldFormatError(f"bad magic {magic!r} at byte offset 0, expected {MAGIC!r}")
    if version != VERSION:
        raise FieldFormatError(f"unsupported version {version} at byte offset 4, expected {VERSION}")
    grid = GridSpec((nx, ny, nz), (lx, ly, lz), alpha)
    expected = _HEADER.size + 8 * grid.num_points
    if len(raw) != expected:
        raise FieldFormatError(
            f"payload size mismatch: file has {len(raw)} bytes, expected {expected}"
        )
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    values = flat.astype(np.float64).reshape(grid.shape, order="F")
    return RealField(grid, values)
