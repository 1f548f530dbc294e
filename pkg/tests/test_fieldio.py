"""FLD1 file format round-trips and rejection paths."""

import struct

import numpy as np
import pytest

from fsptools.fieldio import MAGIC, FieldFormatError, read_field, write_field
from fsptools.spectral import GridSpec, RealField


@pytest.fixture
def field():
    grid = GridSpec((8, 6, 4), (5.0, 6.0, 7.0), 0.85)
    rng = np.random.default_rng(42)
    return RealField(grid, rng.standard_normal(grid.shape))


def test_round_trip_bit_exact(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    back = read_field(path)
    assert back.grid == field.grid
    assert np.array_equal(back.values, field.values)
    # writing again produces identical bytes
    path2 = tmp_path / "u2.fld"
    write_field(path2, back)
    assert path.read_bytes() == path2.read_bytes()


def test_layout_x_fastest(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    raw = path.read_bytes()
    header = struct.calcsize("<4sIIIIdddd")
    first = np.frombuffer(raw, dtype="<f8", offset=header, count=field.grid.n[0])
    assert np.array_equal(first, field.values[:, 0, 0])


def test_rejects_bad_magic(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    raw = bytearray(path.read_bytes())
    raw[0:4] = b"NOPE"
    path.write_bytes(bytes(raw))
    with pytest.raises(FieldFormatError, match="offset 0"):
        read_field(path)


def test_rejects_bad_version(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    raw = bytearray(path.read_bytes())
    raw[4:8] = struct.pack("<I", 2)
    path.write_bytes(bytes(raw))
    with pytest.raises(FieldFormatError, match="version"):
        read_field(path)


def test_rejects_truncated_payload(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(FieldFormatError, match="size"):
        read_field(path)


def test_rejects_short_header(tmp_path):
    path = tmp_path / "u.fld"
    path.write_bytes(MAGIC + b"\x01")
    with pytest.raises(FieldFormatError, match="short"):
        read_field(path)


def test_rejects_nonfinite_payload(tmp_path, field):
    path = tmp_path / "u.fld"
    write_field(path, field)
    raw = bytearray(path.read_bytes())
    header = struct.calcsize("<4sIIIIdddd")
    raw[header : header + 8] = struct.pack("<d", float("nan"))
    path.write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="non-finite"):
        read_field(path)
