"""Standalone reader/writer for the CTEN v1 tensor file format.

The harness deliberately carries its own parser instead of depending on
the extraction toolkit: the binary file is the contract between the two
packages.

Layout (little-endian):

* magic ``CTEN``, u32 version (=1), u32 tensor count,
  u32 dims[3] (electrodes, electrodes, bands), u8 dtype tag (1 = f32);
* per tensor: u16 subject, u16 video, f32 valence, f32 arousal, then the
  payload in row-major order with the band axis fastest (C order of the
  ``(n, n, bands)`` array).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"CTEN"
VERSION = 1
DTYPE_F32 = 1


@dataclass(frozen=True)
class TensorRecord:
    data: np.ndarray  # (n, n, bands) float32
    subject: int
    video: int
    valence: float
    arousal: float


def _read_exact(f, n: int) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated tensor file: wanted {n} bytes, "
                          f"got {len(buf)}")
    return buf


def read_tensors(path) -> list[TensorRecord]:
    path = Path(path)
    with open(path, "rb") as f:
        if _read_exact(f, 4) != MAGIC:
            raise FormatError(f"{path}: bad magic")
        version, count, d0, d1, d2, dtype = struct.unpack(
            "<IIIIIB", _read_exact(f, 21))
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        if dtype != DTYPE_F32:
            raise FormatError(f"{path}: unsupported dtype tag {dtype}")
        payload = d0 * d1 * d2 * 4
        records = []
        for _ in range(count):
            subject, video, valence, arousal = struct.unpack(
                "<HHff", _read_exact(f, 12))
            flat = np.frombuffer(_read_exact(f, payload), dtype="<f4")
            records.append(TensorRecord(
                data=flat.reshape(d0, d1, d2).copy(),
                subject=subject, video=video,
                valence=valence, arousal=arousal))
    return records


def write_tensors(records, path) -> None:
    records = list(records)
    if not records:
        raise FormatError("refusing to write an empty tensor file")
    shape = records[0].data.shape
    if len(shape) != 3 or any(r.data.shape != shape for r in records):
        raise FormatError("all tensors must share one (n, n, bands) shape")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<IIIIIB", VERSION, len(records), *shape,
                            DTYPE_F32))
        for r in records:
            f.write(struct.pack("<HHff", r.subject, r.video,
                                float(r.valence), float(r.arousal)))
            f.write(np.ascontiguousarray(r.data, dtype="<f4").tobytes())
