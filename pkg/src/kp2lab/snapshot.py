"""Binary KP2F snapshots of fields and paths.

Record layout: magic ``KP2F``, u32 version, u32 nx, u32 ny, f64 Lx, f64 Ly,
f64 t, u8 real_flag, then nx*ny complex f64 pairs in ascending-frequency
order with xi as the slow axis.  Files are written little-endian; the reader
also accepts byte-swapped (big-endian) records, detected from the version
field.  A path file is a concatenation of records, one per sample time.
"""

from __future__ import annotations

import io
import os
import struct

import numpy as np

from .paths import SampledPath
from .spectral import Field2D, FrequencyGrid

__all__ = [
    "SnapshotError",
    "MAGIC",
    "VERSION",
    "serialize_field",
    "deserialize_field",
    "write_field",
    "read_field",
    "read_snapshot",
    "write_path",
    "read_path",
]

MAGIC = b"KP2F"
VERSION = 1
_HEADER = "4sIIIdddB"


class SnapshotError(ValueError):
    pass


def serialize_field(field: Field2D, t: float = 0.0, byteorder: str = "<") -> bytes:
    """One KP2F record.  ``byteorder='>'`` writes a big-endian record (for fixtures)."""
    if byteorder not in "<>":
        raise ValueError("byteorder must be '<' or '>'")
    g = field.grid
    head = struct.pack(byteorder + _HEADER, MAGIC, VERSION, g.nx, g.ny, g.Lx, g.Ly, float(t),
                       1 if field.real_flag else 0)
    payload = np.fft.fftshift(np.asarray(field.coeffs)).astype(byteorder + "c16", copy=False)
    return head + payload.tobytes()


def deserialize_field(data, offset: int = 0):
    """Parse one record from ``data`` at ``offset``; returns ``(field, t, next_offset)``."""
    data = memoryview(data)
    hsize = struct.calcsize("<" + _HEADER)
    if len(data) - offset < 8:
        raise SnapshotError("truncated header")
    magic = bytes(data[offset:offset + 4])
    if magic != MAGIC:
        raise SnapshotError(f"bad magic {magic!r}: expected 'KP2F'")
    (ver_le,) = struct.unpack_from("<I", data, offset + 4)
    (ver_be,) = struct.unpack_from(">I", data, offset + 4)
    if ver_le == VERSION:
        order = "<"
    elif ver_be == VERSION:
        order = ">"
    else:
        raise SnapshotError(f"unsupported version field {ver_le} (expected {VERSION})")
    if len(data) - offset < hsize:
        raise SnapshotError("truncated header")
    _, _, nx, ny, Lx, Ly, t, real = struct.unpack_from(order + _HEADER, data, offset)
    if real not in (0, 1):
        raise SnapshotError(f"bad real_flag byte {real}")
    start = offset + hsize
    end = start + 16 * nx * ny
    if len(data) < end:
        raise SnapshotError(f"truncated payload: need {16 * nx * ny} bytes, have {len(data) - start}")
    try:
        grid = FrequencyGrid(nx, ny, Lx, Ly)
    except ValueError as exc:
        raise SnapshotError(f"invalid grid in header: {exc}") from None
    arr = np.frombuffer(data[start:end], dtype=order + "c16").reshape(nx, ny)
    coeffs = np.fft.ifftshift(arr).astype("=c16")
    try:
        field = Field2D(grid, coeffs, bool(real))
    except ValueError as exc:
        raise SnapshotError(f"invariant violation: {exc}") from None
    return field, float(t), end


def _open_read(src):
    if isinstance(src, (str, os.PathLike)):
        with open(src, "rb") as fh:
            return fh.read()
    if isinstance(src, (bytes, bytearray, memoryview)):
        return bytes(src)
    return src.read()


def _write(dest, blob: bytes):
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(blob)
    else:
        dest.write(blob)


def write_field(dest, field: Field2D, t: float = 0.0):
    _write(dest, serialize_field(field, t))


def read_snapshot(src):
    """Single-record read; returns ``(field, t)`` and rejects trailing bytes."""
    data = _open_read(src)
    field, t, end = deserialize_field(data)
    if end != len(data):
        raise SnapshotError("trailing bytes after the record")
    return field, t


def read_field(src) -> Field2D:
    return read_snapshot(src)[0]


def write_path(dest, path: SampledPath):
    if path.grid is None:
        raise ValueError("only paths of fields can be stored")
    buf = io.BytesIO()
    for t, f in zip(path.times, path.fields()):
        buf.write(serialize_field(f, t))
    _write(dest, buf.getvalue())


def read_path(src) -> SampledPath:
    data = _open_read(src)
    fields, times = [], []
    off = 0
    while off < len(data):
        f, t, off = deserialize_field(data, off)
        fields.append(f)
        times.append(t)
    if not fields:
        raise SnapshotError("empty path file")
    try:
        return SampledPath.from_fields(times, fields)
    except ValueError as exc:
        raise SnapshotError(f"inconsistent path records: {exc}") from None
