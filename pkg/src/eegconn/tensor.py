"""Connectivity tensors and the CTEN v1 file format.

CTEN v1 layout (little-endian): magic "CTEN", u32 version=1, u32 count,
u32 dims[3] (N_e, N_e, bands), u8 dtype (1 = f32), then per tensor:
u16 subject, u16 video, f32 valence, f32 arousal, payload row-major with
band as the fastest axis.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .connectivity import ConnectivityMatrix
from .errors import BandOrderError, FormatError
from .io import TrialLabels
from .ordering import ElectrodeOrder, apply_order

MAGIC = b"CTEN"
VERSION = 1
DTYPE_F32 = 1


@dataclass(frozen=True)
class ConnectivityTensor:
    data: np.ndarray  # (N_e, N_e, B) float32
    order: Optional[ElectrodeOrder] = None
    labels: Optional[TrialLabels] = None
    segment_start: int = 0

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float32)
        if data.ndim != 3 or data.shape[0] != data.shape[1]:
            raise ValueError(f"tensor must be (N_e, N_e, B), got {data.shape}")
        object.__setattr__(self, "data", data)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape


def stack_bands(mats: list[ConnectivityMatrix],
                o: ElectrodeOrder,
                labels: Optional[TrialLabels] = None) -> ConnectivityTensor:
    """Reorder every band matrix by ``o`` and stack along the depth axis.

    The matrices must share measure and segment provenance and arrive in
    canonical bank order.
    """
    if not mats:
        raise BandOrderError("no band matrices to stack")
    measures = {m.measure for m in mats}
    if len(measures) != 1:
        raise BandOrderError(f"mixed measures: {sorted(measures)}")
    starts = {m.segment_start for m in mats}
    if len(starts) != 1:
        raise BandOrderError("matrices come from different segments")
    names = [m.band.name if m.band is not None else None for m in mats]
    if len(set(names)) != len(names):
        raise BandOrderError(f"duplicate bands in stack: {names}")
    ordered = [apply_order(m, o).values for m in mats]
    data = np.stack(ordered, axis=-1)
    return ConnectivityTensor(data=data, order=o, labels=labels,
                              segment_start=mats[0].segment_start or 0)


def _labels_tuple(t: ConnectivityTensor):
    if t.labels is None:
        return (0, 0, 0.0, 0.0)
    lb = t.labels
    return (lb.subject_id, lb.video_id, lb.valence, lb.arousal)


def export_tensors(ts: list[ConnectivityTensor], path) -> None:
    """Write a CTEN v1 file; deterministic byte-for-byte."""
    if not ts:
        raise FormatError("nothing to export")
    shape = ts[0].shape
    if any(t.shape != shape for t in ts):
        raise FormatError("tensors have non-uniform shapes")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(ts)))
        f.write(struct.pack("<III", *shape))
        f.write(struct.pack("<B", DTYPE_F32))
        for t in ts:
            f.write(struct.pack("<HHff", *_labels_tuple(t)))
            f.write(t.data.astype("<f4", copy=False).tobytes())


def import_tensors(path) -> list[ConnectivityTensor]:
    """Read a CTEN v1 file; bit-exact inverse of export_tensors."""
    path = Path(path)
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic, not a CTEN file")
    version, count = struct.unpack_from("<II", raw, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    dims = struct.unpack_from("<III", raw, 12)
    (dtype,) = struct.unpack_from("<B", raw, 24)
    if dtype != DTYPE_F32:
        raise FormatError(f"{path}: unknown dtype tag {dtype}")
    payload_len = int(np.prod(dims)) * 4
    offset = 25
    expected = offset + count * (12 + payload_len)
    if len(raw) != expected:
        raise FormatError(
            f"{path}: file has {len(raw)} bytes, expected {expected}")
    out = []
    for _ in range(count):
        subj, vid, val, aro = struct.unpack_from("<HHff", raw, offset)
        offset += 12
        data = np.frombuffer(raw, dtype="<f4", count=int(np.prod(dims)),
                             offset=offset).reshape(dims)
        offset += payload_len
        out.append(ConnectivityTensor(
            data=data, labels=TrialLabels(subj, vid, val, aro)))
    return out


def write_manifest(ts: list[ConnectivityTensor], path) -> None:
    """Debug manifest: one line per tensor (index, subject, video, start)."""
    with open(path, "w") as f:
        f.write("# index,subject,video,segment_start\n")
        for i, t in enumerate(ts):
            subj, vid, _, _ = _labels_tuple(t)
            f.write(f"{i},{subj},{vid},{t.segment_start}\n")
