"""Pairwise connectivity measures and matrix assembly.

Measures:

* PCC — population-moment Pearson correlation, clamped to [-1, 1];
* PLV — modulus of the mean unit phasor of the phase differences, in [0, 1];
* TE  — first-order, lag-1 transfer entropy in nats, plug-in estimate on
  equal-width bins over each sequence's own range.

PCC and PLV are symmetric and computed once per unordered pair; TE is
directed and computed per ordered pair.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSignal, PartialFailure
from .filterbank import BandDefinition, BandedSegment, analytic_phase

DEFAULT_TE_BINS = 8

#: diagonal value per measure (self-connectivity convention)
DIAGONAL = {"PCC": 1.0, "PLV": 1.0, "TE": 0.0}


@dataclass(frozen=True)
class ConnectivityMatrix:
    measure: str
    values: np.ndarray  # (N_e, N_e)
    band: Optional[BandDefinition] = None
    segment_start: Optional[int] = None
    n_evaluations: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"matrix must be square, got {values.shape}")
        object.__setattr__(self, "values", values)

    @property
    def n_electrodes(self) -> int:
        return self.values.shape[0]


def pcc(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation with population (1/T) moments."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need equal-length sequences with T >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt(np.mean(dx * dx))
    sy = np.sqrt(np.mean(dy * dy))
    if sx == 0 or sy == 0:
        raise DegenerateSignal("zero-variance input")
    r = np.mean(dx * dy) / (sx * sy)
    return float(np.clip(r, -1.0, 1.0))


def plv(phx: np.ndarray, phy: np.ndarray) -> float:
    """Phase locking value: |mean exp(j(phx - phy))|."""
    phx = np.asarray(phx, dtype=float)
    phy = np.asarray(phy, dtype=float)
    if phx.shape != phy.shape or phx.size < 1:
        raise ValueError("need equal-length phase sequences")
    if not (np.all(np.isfinite(phx)) and np.all(np.isfinite(phy))):
        raise ValueError("phases must be finite")
    v = np.abs(np.mean(np.exp(1j * (phx - phy))))
    return float(min(v, 1.0))


def _quantize(x: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin indices over [min, max]; constant input -> bin 0."""
    lo, hi = x.min(), x.max()
    if hi == lo:
        return np.zeros(x.shape, dtype=np.intp)
    idx = np.floor((x - lo) / (hi - lo) * bins).astype(np.intp)
    return np.minimum(idx, bins - 1)


def te(x: np.ndarray, y: np.ndarray, bins: int = DEFAULT_TE_BINS) -> float:
    """Lag-1 transfer entropy TE(x -> y) in nats, plug-in estimate.

    Constant input collapses to a single bin; the result is then 0 and a
    DegenerateSignal warning is emitted.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise ValueError("need equal-length sequences with T >= 3")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    qx = _quantize(x, bins)
    qy = _quantize(y, bins)
    if qx.max() == qx.min() or qy.max() == qy.min():
        warnings.warn("constant sequence: TE is 0",
                      category=UserWarning, stacklevel=2)
        return 0.0
    xs, ys, yn = qx[:-1], qy[:-1], qy[1:]
    flat = (xs * bins + ys) * bins + yn
    counts = np.bincount(flat, minlength=bins ** 3).reshape(bins, bins, bins)
    n = len(xs)
    p_xyy = counts / n                       # p(x_t, y_t, y_{t+1})
    p_xy = p_xyy.sum(axis=2, keepdims=True)  # p(x_t, y_t)
    p_yy = p_xyy.sum(axis=0, keepdims=True)  # p(y_t, y_{t+1})
    p_y = p_xyy.sum(axis=(0, 2), keepdims=True)  # p(y_t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (p_xyy * p_y) / (p_xy * p_yy)
        logterm = np.where(p_xyy > 0, np.log(ratio, where=p_xyy > 0), 0.0)
    val = float(np.sum(p_xyy * logterm))
    return max(val, 0.0)


def _pcc_matrix(data: np.ndarray) -> np.ndarray:
    t = data.shape[1]
    centered = data - data.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.mean(centered ** 2, axis=1))
    cov = centered @ centered.T / t
    mat = cov / np.outer(sd, sd)
    return np.clip(mat, -1.0, 1.0)


def _plv_matrix(phases: np.ndarray) -> np.ndarray:
    t = phases.shape[1]
    phasors = np.exp(1j * phases)
    mat = np.abs(phasors @ phasors.conj().T) / t
    return np.minimum(mat, 1.0)


def connectivity_matrix(bs: BandedSegment, band_index: int, measure: str,
                        bins: int = DEFAULT_TE_BINS) -> ConnectivityMatrix:
    """Assemble the full N_e x N_e matrix for one band.

    PCC/PLV evaluate each unordered pair once and mirror (N(N-1)/2
    evaluations); TE evaluates every ordered pair (N(N-1)). Degenerate
    pairs raise PartialFailure listing the offenders.
    """
    measure = measure.upper()
    if measure not in DIAGONAL:
        raise ValueError(f"unknown measure {measure!r}")
    if not 0 <= band_index < bs.n_bands:
        raise ValueError(f"band index {band_index} out of range")
    data = bs.data[band_index]
    n = data.shape[0]

    if measure == "PCC":
        sd = data.std(axis=1)
        bad = np.flatnonzero(sd == 0)
        if bad.size:
            pairs = [(int(i), int(k)) for i in bad for k in range(n) if k != i]
            raise PartialFailure("zero-variance channels", pairs)
        mat = _pcc_matrix(data)
        n_eval = n * (n - 1) // 2
    elif measure == "PLV":
        mat = _plv_matrix(analytic_phase(data))
        n_eval = n * (n - 1) // 2
    else:
        mat = np.zeros((n, n))
        failed = []
        for i in range(n):
            for k in range(n):
                if i == k:
                    continue
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        mat[i, k] = te(data[i], data[k], bins)
                except (DegenerateSignal, ValueError):
                    failed.append((i, k))
        if failed:
            raise PartialFailure("degenerate pairs in TE matrix", failed)
        n_eval = n * (n - 1)

    # enforce exact symmetry / diagonal conventions
    if measure in ("PCC", "PLV"):
        iu = np.triu_indices(n, 1)
        sym = np.zeros((n, n))
        sym[iu] = mat[iu]
        mat = sym + sym.T
    np.fill_diagonal(mat, DIAGONAL[measure])
    return ConnectivityMatrix(measure=measure, values=mat,
                              band=bs.bands[band_index],
                              segment_start=bs.source.start_sample,
                              n_evaluations=n_eval)
