"""Recording types, EEGR v1 binary I/O, CSV import, and segmentation.

EEGR v1 layout (little-endian):
  magic "EEGR", u32 version=1, u32 channel count,
  u32 label length + UTF-8 comma-separated electrode names,
  f64 sample_rate, u64 T,
  u8 labels flag; if 1: u16 subject_id, u16 video_id, f32 valence, f32 arousal,
  channel-major f32 samples.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import EmptySegmentation, FormatError, LayoutError
from .layout import ElectrodeLayout, layout_from_names

MAGIC = b"EEGR"
VERSION = 1


@dataclass(frozen=True)
class TrialLabels:
    subject_id: int
    video_id: int
    valence: float
    arousal: float


@dataclass(frozen=True)
class EegRecording:
    layout: ElectrodeLayout
    sample_rate: float
    samples: np.ndarray  # (N_e, T) float32, channel-major
    labels: Optional[TrialLabels] = None

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.float32)
        if samples.ndim != 2 or samples.shape[0] != self.layout.n_electrodes:
            raise FormatError(
                f"samples shape {samples.shape} does not match "
                f"{self.layout.n_electrodes} electrodes")
        if samples.shape[1] < 2:
            raise FormatError("each channel needs at least 2 samples")
        if not self.sample_rate > 0:
            raise FormatError("sample_rate must be positive")
        object.__setattr__(self, "samples", samples)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate


@dataclass(frozen=True)
class Segment:
    """A window into a recording; the data is a read-only view."""

    recording: EegRecording
    start_sample: int
    length_samples: int

    def __post_init__(self):
        if self.start_sample < 0 or self.length_samples < 1:
            raise FormatError("segment bounds must be positive")
        if self.start_sample + self.length_samples > self.recording.n_samples:
            raise FormatError("segment extends past the recording")

    @property
    def data(self) -> np.ndarray:
        view = self.recording.samples[
            :, self.start_sample:self.start_sample + self.length_samples]
        view.flags.writeable = False
        return view

    @property
    def labels(self) -> Optional[TrialLabels]:
        return self.recording.labels


def save_recording(rec: EegRecording, path) -> None:
    """Write an EEGR v1 file; round-trips f32 samples bit-exactly."""
    names = ",".join(rec.layout.names).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, rec.layout.n_electrodes))
        f.write(struct.pack("<I", len(names)))
        f.write(names)
        f.write(struct.pack("<dQ", rec.sample_rate, rec.n_samples))
        if rec.labels is None:
            f.write(struct.pack("<B", 0))
        else:
            f.write(struct.pack("<BHHff", 1, rec.labels.subject_id,
                                rec.labels.video_id, rec.labels.valence,
                                rec.labels.arousal))
        f.write(rec.samples.astype("<f4", copy=False).tobytes())


def _read_exact(f, n: int) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file: wanted {n} bytes, got {len(buf)}")
    return buf


def load_recording(path) -> EegRecording:
    """Parse an EEGR v1 file into a validated recording."""
    path = Path(path)
    with open(path, "rb") as f:
        if _read_exact(f, 4) != MAGIC:
            raise FormatError(f"{path}: bad magic, not an EEGR file")
        version, n_ch = struct.unpack("<II", _read_exact(f, 8))
        if version != VERSION:
            raise FormatError(f"{path}: unsupported version {version}")
        (label_len,) = struct.unpack("<I", _read_exact(f, 4))
        names = _read_exact(f, label_len).decode("utf-8").split(",")
        if len(names) != n_ch:
            raise FormatError(
                f"{path}: header declares {n_ch} channels but "
                f"{len(names)} labels")
        sample_rate, n_samples = struct.unpack("<dQ", _read_exact(f, 16))
        (flag,) = struct.unpack("<B", _read_exact(f, 1))
        labels = None
        if flag == 1:
            subj, vid, val, aro = struct.unpack("<HHff", _read_exact(f, 12))
            labels = TrialLabels(subj, vid, val, aro)
        elif flag != 0:
            raise FormatError(f"{path}: bad labels flag {flag}")
        payload = f.read()
    expected = n_ch * n_samples * 4
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}")
    samples = np.frombuffer(payload, dtype="<f4").reshape(n_ch, n_samples)
    try:
        layout = layout_from_names(names)
    except LayoutError as e:
        raise LayoutError(f"{path}: {e}") from e
    return EegRecording(layout=layout, sample_rate=sample_rate,
                        samples=samples, labels=labels)


def load_csv(path, sample_rate: float, coords=None,
             labels: Optional[TrialLabels] = None) -> EegRecording:
    """Import a CSV recording: header row of electrode names, one row per
    sample."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            names = [c.strip() for c in next(reader)]
        except StopIteration:
            raise FormatError(f"{path}: empty CSV") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names):
                raise FormatError(
                    f"{path}:{lineno}: {len(row)} values for "
                    f"{len(names)} channels")
            rows.append([float(v) for v in row])
    if len(rows) < 2:
        raise FormatError(f"{path}: fewer than 2 samples")
    samples = np.asarray(rows, dtype=np.float32).T
    return EegRecording(layout=layout_from_names(names, coords=coords),
                        sample_rate=sample_rate, samples=samples,
                        labels=labels)


def segment(rec: EegRecording, window_s: float,
            overlap_s: float) -> list[Segment]:
    """Cut overlapping windows.

    Hop = (window - overlap) seconds rounded to the nearest sample (ties
    toward zero); windows start at multiples of the hop and lie fully
    inside the recording.
    """
    if not 0 <= overlap_s < window_s:
        raise ValueError("need 0 <= overlap_s < window_s")
    w = int(round(window_s * rec.sample_rate))
    if w < 2:
        raise ValueError("window must span at least 2 samples")
    hop_exact = (window_s - overlap_s) * rec.sample_rate
    # nearest sample, ties toward zero
    hop = max(int(np.ceil(hop_exact - 0.5)), 1)
    if w > rec.n_samples:
        raise EmptySegmentation(
            f"window of {w} samples exceeds recording length "
            f"{rec.n_samples}")
    count = (rec.n_samples - w) // hop + 1
    return [Segment(rec, i * hop, w) for i in range(count)]
