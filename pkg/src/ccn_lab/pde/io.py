"""Checkpoint files and CSV diagnostics.

Checkpoint layout (little-endian, no padding)::

    magic   4s   b"CCNF"
    version u32  1
    kind    u8   0 = rgl_psi (complex), 1 = ccn_phi (real)
    nx, ny  u32, u32
    Lx, Ly  f64, f64
    t       f64
    payload row-major (ny, nx) f64 pairs (re, im) or f64
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from .grid import Field2D, PeriodicGrid2D

MAGIC = b"CCNF"
VERSION = 1
HEADER = struct.Struct("<4sIBIIddd")
KIND_CODES = {"rgl_psi": 0, "ccn_phi": 1}
CSV_COLUMNS = ("t", "mode_re", "mode_im", "amplitude", "fitted_rate")


def write_checkpoint(path, field: Field2D) -> Path:
    g = field.grid
    path = Path(path)
    header = HEADER.pack(MAGIC, VERSION, KIND_CODES[field.kind], g.nx, g.ny, g.Lx, g.Ly, field.t)
    if field.is_complex:
        payload = np.ascontiguousarray(field.values, dtype="<c16").view("<f8")
    else:
        payload = np.ascontiguousarray(field.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())
    return path


def read_checkpoint(path, dealias: float = 2.0 / 3.0) -> Field2D:
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise ConfigurationError(f"{path}: truncated header")
    magic, version, code, nx, ny, Lx, Ly, t = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ConfigurationError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ConfigurationError(f"{path}: unsupported version {version}")
    kinds = {v: k for k, v in KIND_CODES.items()}
    if code not in kinds:
        raise ConfigurationError(f"{path}: unknown kind code {code}")
    kind = kinds[code]
    width = 2 if kind == "rgl_psi" else 1
    body = np.frombuffer(data, dtype="<f8", offset=HEADER.size)
    if body.size != nx * ny * width:
        raise ConfigurationError(f"{path}: payload has {body.size} values, expected {nx * ny * width}")
    values = body.view("<c16") if width == 2 else body
    grid = PeriodicGrid2D(nx, ny, Lx, Ly, dealias)
    return Field2D(grid, values.reshape(ny, nx).copy(), kind, t)


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_diagnostics_csv(path, t, mode, fitted_rate) -> Path:
    """RFC 4180 CSV with columns t, mode_re, mode_im, amplitude, fitted_rate."""
    path = Path(path)
    mode = np.asarray(mode, dtype=complex)
    amp = np.abs(mode)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        for ti, mi, ai in zip(t, mode, amp):
            w.writerow([fmt(ti), fmt(mi.real), fmt(mi.imag), fmt(ai), fmt(fitted_rate)])
    return path


def read_diagnostics_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in CSV_COLUMNS}
