"""Concentrativeness, McNemar / Wilcoxon significance tests, error reports.

Concentrativeness measures how tightly a set of valence-related electrode
pairs clusters inside the sliding windows of a convolutional kernel on the
reordered connectivity matrix: C = (1/(N-M)) * sum r_n, where r_n is the
fraction of marked cells in window n (zero padding, padded cells count in
the denominator), N is the total window count and M the number of empty
windows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.signal import convolve2d

from .errors import (EmptyIncidence, LabelError, NoDiscordance, NoVariation)
from .ordering import ElectrodeOrder

# Electrode pairs with reported low-/high-valence connectivity differences.
PCC_LOW_PAIRS = (
    ("Fp2", "F7"), ("F7", "O1"), ("Fz", "T8"), ("T8", "P3"),
    ("P8", "O2"), ("O1", "O2"),
)
PCC_HIGH_PAIRS = (
    ("Fp1", "F8"), ("Fp1", "P7"), ("Fp2", "C3"), ("F3", "F4"),
    ("F3", "P7"), ("F4", "C3"), ("F7", "F8"), ("F7", "P8"),
    ("Fz", "T8"), ("C3", "T8"), ("T7", "T8"),
)
PLV_LOW_PAIRS = (
    ("Fp1", "Fp2"), ("Fp1", "FC1"), ("Fp1", "FC2"), ("Fp1", "F4"),
    ("Fp1", "Fz"), ("Fp1", "Cz"), ("Fp1", "P8"), ("Fp2", "Fz"),
    ("Fp2", "P3"), ("F3", "Fz"), ("F4", "T8"), ("F8", "Fz"),
    ("F8", "P7"), ("Fz", "P4"), ("T7", "P4"), ("T7", "P7"),
    ("T7", "Pz"), ("T8", "P7"), ("T8", "Pz"), ("C3", "P3"),
    ("C3", "P4"), ("P7", "O2"),
)
PLV_HIGH_PAIRS = (
    ("Fp2", "T7"), ("Fp2", "Pz"), ("F3", "Fz"), ("Fz", "C4"),
    ("Fz", "P4"), ("C3", "C4"), ("C4", "P3"), ("Cz", "Pz"),
    ("T7", "Pz"), ("P7", "P8"), ("P7", "O2"),
)


@dataclass(frozen=True)
class ValencePairSet:
    low: tuple[tuple[str, str], ...]
    high: tuple[tuple[str, str], ...]
    measure: str

    def __post_init__(self):
        for side in (self.low, self.high):
            for a, b in side:
                if a == b:
                    raise LabelError(f"self-pair {a}-{b}")


PAIR_SETS = {
    "PCC": ValencePairSet(low=PCC_LOW_PAIRS, high=PCC_HIGH_PAIRS,
                          measure="PCC"),
    "PLV": ValencePairSet(low=PLV_LOW_PAIRS, high=PLV_HIGH_PAIRS,
                          measure="PLV"),
}


@dataclass(frozen=True)
class PredictionRecord:
    instance_id: int
    true_label: int
    predicted: int
    subject_id: Optional[int] = None
    video_id: Optional[int] = None
    valence: Optional[float] = None


def incidence_mask(o: ElectrodeOrder, pairs: Sequence[tuple[int, int]],
                   n_e: int) -> np.ndarray:
    """Binary N_e x N_e mask under order ``o``: both (i, k) and (k, i)
    marked for every pair of original electrode indices."""
    inv = np.argsort(np.asarray(o.perm))
    mask = np.zeros((n_e, n_e), dtype=float)
    for a, b in pairs:
        if not (0 <= a < n_e and 0 <= b < n_e):
            raise LabelError(f"pair index ({a}, {b}) out of range")
        if a == b:
            raise LabelError(f"self-pair ({a}, {b})")
        i, k = inv[a], inv[b]
        mask[i, k] = 1.0
        mask[k, i] = 1.0
    return mask


def pairs_to_indices(pairs: Sequence[tuple[str, str]],
                     names: Sequence[str]) -> list[tuple[int, int]]:
    names = list(names)
    out = []
    for a, b in pairs:
        if a not in names or b not in names:
            raise LabelError(f"pair {a}-{b} references unknown electrodes")
        out.append((names.index(a), names.index(b)))
    return out


def concentrativeness(o: ElectrodeOrder, pairs: Sequence[tuple[int, int]],
                      s: int, n_e: int) -> float:
    """Mean incidence ratio over the nonempty s x s sliding windows."""
    if s < 1 or s % 2 == 0:
        raise ValueError("kernel size must be odd and >= 1")
    mask = incidence_mask(o, pairs, n_e)
    counts = convolve2d(mask, np.ones((s, s)), mode="same")
    r = counts / (s * s)
    n = n_e * n_e
    m = int(np.count_nonzero(counts < 0.5))
    if n == m:
        raise EmptyIncidence("no window contains a marked cell")
    return float(r.sum() / (n - m))


def mcnemar(a: Sequence[PredictionRecord], b: Sequence[PredictionRecord],
            continuity: bool = False) -> dict:
    """Paired chi-square test on discordant outcomes between two systems."""
    if len(a) != len(b):
        raise ValueError("prediction lists differ in length")
    b_count = c_count = 0
    for ra, rb in zip(a, b):
        if ra.instance_id != rb.instance_id or ra.true_label != rb.true_label:
            raise ValueError(
                f"instance mismatch at id {ra.instance_id}/{rb.instance_id}")
        ok_a = ra.predicted == ra.true_label
        ok_b = rb.predicted == rb.true_label
        if ok_a and not ok_b:
            b_count += 1
        elif ok_b and not ok_a:
            c_count += 1
    if b_count + c_count == 0:
        raise NoDiscordance("no discordant pairs")
    diff = abs(b_count - c_count)
    if continuity:
        diff = max(diff - 1, 0)
    chi2 = diff ** 2 / (b_count + c_count)
    p = math.erfc(math.sqrt(chi2 / 2))
    return {"chi2": chi2, "p": p, "b_count": b_count, "c_count": c_count}


def _rank_abs(d: np.ndarray) -> np.ndarray:
    """Average ranks of |d| (1-based)."""
    a = np.abs(d)
    order = np.argsort(a, kind="stable")
    ranks = np.empty(len(a))
    sorted_a = a[order]
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and sorted_a[j + 1] == sorted_a[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _wilcoxon_exact_p(w: float, ranks: np.ndarray) -> float:
    """Two-sided p by dynamic programming over the 2^n sign assignments."""
    scaled = np.round(ranks * 2).astype(int)  # average ranks are half-integer
    total = int(scaled.sum())
    dist = np.zeros(total + 1)
    dist[0] = 1.0
    for r in scaled:
        shifted = np.zeros_like(dist)
        shifted[r:] = dist[:total + 1 - r]
        dist = (dist + shifted) / 2
    w2 = w * 2
    mu = total / 2
    dev = abs(w2 - mu)
    support = np.arange(total + 1)
    # symmetric null: two-sided mass at least as extreme as |W - mu|
    return float(dist[np.abs(support - mu) >= dev - 1e-9].sum())


def wilcoxon_one_sample(xs: Sequence[float], m0: float,
                        method: str = "auto") -> dict:
    """One-sample Wilcoxon signed-rank test against median ``m0``.

    W is the positive-rank sum with average ranks for ties. The two-sided
    p-value is exact (sign-assignment distribution) for n <= 25, otherwise
    a normal approximation with tie-corrected variance and continuity
    correction. ``method`` forces "exact" or "normal".
    """
    d = np.asarray(xs, dtype=float) - m0
    d = d[d != 0]
    n = len(d)
    if n < 5:
        raise NoVariation(f"only {n} nonzero differences; need >= 5")
    ranks = _rank_abs(d)
    w = float(ranks[d > 0].sum())
    if method == "auto":
        method = "exact" if n <= 25 else "normal"
    if method == "exact":
        p = _wilcoxon_exact_p(w, ranks)
    else:
        mu = n * (n + 1) / 4
        var = n * (n + 1) * (2 * n + 1) / 24
        _, tie_counts = np.unique(ranks, return_counts=True)
        var -= float(np.sum(tie_counts ** 3 - tie_counts)) / 48
        dev = abs(w - mu)
        z = max(dev - 0.5, 0.0) / math.sqrt(var)
        p = math.erfc(z / math.sqrt(2))
    return {"W": w, "p": min(p, 1.0), "n": n}


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank-order correlation (average ranks)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("need equal-length samples with n >= 2")
    rx = _rank_abs(x - x.min() + 1)  # all positive, so ranks of the values
    ry = _rank_abs(y - y.min() + 1)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = math.sqrt(float(np.sum(rx ** 2) * np.sum(ry ** 2)))
    if denom == 0:
        raise ValueError("constant input has no rank correlation")
    return float(np.sum(rx * ry) / denom)


def error_report(preds: Sequence[PredictionRecord],
                 group_by: str) -> dict:
    """Per-group error rates.

    ``group_by`` is "subject", "video", or "valence_side"; the latter
    splits videos at the median of the per-video valence scores (>= median
    counts as high).
    """
    if group_by not in ("subject", "video", "valence_side"):
        raise ValueError(f"unknown grouping {group_by!r}")
    groups: dict = {}
    if group_by == "valence_side":
        by_video: dict = {}
        for r in preds:
            if r.video_id is None or r.valence is None:
                raise LabelError("valence_side grouping needs video ids "
                                 "and valence scores")
            by_video.setdefault(r.video_id, []).append(r.valence)
        med = float(np.median([np.mean(v) for v in by_video.values()]))
        keyfn = lambda r: "high" if np.mean(by_video[r.video_id]) >= med \
            else "low"
    elif group_by == "subject":
        def keyfn(r):
            if r.subject_id is None:
                raise LabelError("subject grouping needs subject ids")
            return r.subject_id
    else:
        def keyfn(r):
            if r.video_id is None:
                raise LabelError("video grouping needs video ids")
            return r.video_id
    for r in preds:
        g = groups.setdefault(keyfn(r), [0, 0])
        g[0] += int(r.predicted != r.true_label)
        g[1] += 1
    report = {}
    for key, (wrong, total) in sorted(groups.items(), key=lambda kv: str(kv[0])):
        if total == 0:
            warnings.warn(f"empty group {key!r} omitted")
            continue
        report[key] = {"wrong": wrong, "total": total,
                       "error_rate": wrong / total}
    return report
