"""Sub-band decomposition and instantaneous phase.

The bank is linear-phase FIR (Hamming-windowed sinc, 129 taps at 128 Hz,
tap count scaled proportionally for other rates and forced odd), applied
with reflection padding and group-delay compensation so the output is
aligned with the input. Phase comes from the discrete analytic signal
(one-sided spectrum method).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sig

from .errors import PhaseUndefined, SegmentTooShort
from .io import Segment

REFERENCE_TAPS = 129
REFERENCE_RATE = 128.0
NYQUIST_MARGIN = 0.999


@dataclass(frozen=True)
class BandDefinition:
    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"need 0 <= lo < hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class BandedSegment:
    """Per-band, per-channel filtered samples for one segment."""

    bands: tuple[BandDefinition, ...]
    data: np.ndarray  # (n_bands, N_e, length)
    source: Segment

    @property
    def n_bands(self) -> int:
        return len(self.bands)


_CANONICAL_EDGES = (
    ("delta", 0.0, 3.0),
    ("theta", 4.0, 7.0),
    ("low-alpha", 8.0, 9.5),
    ("high-alpha", 10.5, 12.0),
    ("alpha", 8.0, 12.0),
    ("low-beta", 13.0, 16.0),
    ("mid-beta", 17.0, 20.0),
    ("high-beta", 21.0, 29.0),
    ("beta", 13.0, 29.0),
    ("gamma", 30.0, 50.0),
)


def canonical_bank(sample_rate: float) -> list[BandDefinition]:
    """The 10 sub-frequency bands, each upper edge clamped below Nyquist."""
    if sample_rate <= 0:
        raise ValueError("sample_rate must be positive")
    ceiling = NYQUIST_MARGIN * sample_rate / 2
    return [BandDefinition(name, lo, min(hi, ceiling))
            for name, lo, hi in _CANONICAL_EDGES]


def _n_taps(sample_rate: float) -> int:
    n = int(round(REFERENCE_TAPS * sample_rate / REFERENCE_RATE))
    return max(n | 1, 3)


def band_filter_taps(band: BandDefinition, sample_rate: float) -> np.ndarray:
    """Hamming-windowed sinc taps; lo = 0 becomes a plain low-pass."""
    n = _n_taps(sample_rate)
    if band.lo <= 0:
        return sig.firwin(n, band.hi, fs=sample_rate)
    return sig.firwin(n, [band.lo, band.hi], fs=sample_rate, pass_zero=False)


def filter_band(x: np.ndarray, band: BandDefinition,
                sample_rate: float) -> np.ndarray:
    """Band-pass one or more channels (last axis = time), zero group delay."""
    x = np.asarray(x, dtype=float)
    taps = band_filter_taps(band, sample_rate)
    n = len(taps)
    if x.shape[-1] < n:
        raise SegmentTooShort(
            f"segment of {x.shape[-1]} samples is shorter than the "
            f"{n}-tap filter")
    pad = n - 1
    left = x[..., pad:0:-1]
    right = x[..., -2:-pad - 2:-1]
    padded = np.concatenate([left, x, right], axis=-1)
    # symmetric taps + centered convolution = zero group delay
    out = sig.fftconvolve(padded, taps[None, :] if x.ndim == 2 else taps,
                          mode="same", axes=-1)
    return out[..., pad:pad + x.shape[-1]]


def apply_filterbank(seg: Segment,
                     bank: list[BandDefinition]) -> BandedSegment:
    """Decompose a segment into the given bands; output length equals the
    segment length."""
    data = np.asarray(seg.data, dtype=float)
    stacked = np.stack([filter_band(data, band, seg.recording.sample_rate)
                        for band in bank])
    return BandedSegment(bands=tuple(bank), data=stacked, source=seg)


def analytic_phase(x: np.ndarray) -> np.ndarray:
    """Instantaneous phase of the discrete analytic signal, in (-pi, pi].

    Accepts a single channel or a (channels, time) matrix.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 4:
        raise ValueError("need at least 4 samples")
    if not np.any(x):
        raise PhaseUndefined("phase of the all-zero signal is undefined")
    return np.angle(sig.hilbert(x, axis=-1))
