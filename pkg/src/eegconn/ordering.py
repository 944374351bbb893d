"""Electrode orderings: geometry-greedy and unidimensional-scaling (UDS).

Strategies:

* ``dist`` — greedy nearest-neighbor walk over scalp coordinates;
* ``dist-restr`` — the same walk, restricted to the current hemisphere
  until it is exhausted (midline sites belong to both hemispheres);
* ``data-global`` / ``data-local`` — UDS on a disparity transform of the
  mean connectivity matrix (global: 2(1-c), local: c^2), minimizing the
  normalized stress with SMACOF majorization plus a combinatorial polish.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import nnls

from .connectivity import ConnectivityMatrix
from .errors import DegenerateDisparity, DimensionError, LayoutError
from .layout import ElectrodeLayout

SMACOF_MAX_ITER = 500
SMACOF_TOL = 1e-10
DEFAULT_RESTARTS = 32
MAX_POLISH_SEEDS = 12


@dataclass(frozen=True)
class ElectrodeOrder:
    """Permutation of electrode indices: position -> original index."""

    perm: tuple[int, ...]
    strategy: str
    stress: Optional[float] = None

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError("perm is not a permutation of 0..N_e-1")
        object.__setattr__(self, "perm", perm)

    def inverse(self) -> "ElectrodeOrder":
        inv = np.argsort(np.asarray(self.perm))
        return ElectrodeOrder(perm=tuple(int(i) for i in inv),
                              strategy=f"{self.strategy}-inverse")


@dataclass(frozen=True)
class DisparityMatrix:
    values: np.ndarray
    mode: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("disparity matrix must be square")
        if not np.allclose(values, values.T):
            raise ValueError("disparity matrix must be symmetric")
        if np.any(values < 0):
            raise ValueError("disparities must be nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class UdsEmbedding:
    positions: np.ndarray  # (N_e,) scalar coordinate per electrode

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if not np.all(np.isfinite(pos)):
            raise ValueError("embedding positions must be finite")
        object.__setattr__(self, "positions", pos)


# ---------------------------------------------------------------------------
# geometry-greedy strategies

def greedy_dist_order(layout: ElectrodeLayout,
                      start: str = "Fp1") -> ElectrodeOrder:
    """Nearest-neighbor walk from ``start``; ties go to the lower index."""
    cur = layout.index_of(start)
    n = layout.n_electrodes
    unvisited = set(range(n))
    unvisited.remove(cur)
    perm = [cur]
    while unvisited:
        cand = sorted(unvisited)
        d = np.linalg.norm(layout.coords[cand] - layout.coords[cur], axis=1)
        cur = cand[int(np.argmin(d))]
        unvisited.remove(cur)
        perm.append(cur)
    return ElectrodeOrder(perm=tuple(perm), strategy="dist")


def greedy_dist_restr_order(layout: ElectrodeLayout,
                            start: str = "Fp1") -> ElectrodeOrder:
    """Hemisphere-restricted walk; crosses the border only when the current
    hemisphere has no unvisited electrodes left. Midline sites count for
    both hemispheres."""
    cur = layout.index_of(start)
    n = layout.n_electrodes
    unvisited = set(range(n))
    unvisited.remove(cur)
    perm = [cur]
    # the walk's side is the last non-midline hemisphere visited; stepping
    # onto a midline site does not open the border
    side = layout.hemisphere[cur]
    side = None if side == "midline" else side
    while unvisited:
        if side is None:
            cand = sorted(unvisited)
        else:
            cand = sorted(i for i in unvisited
                          if layout.hemisphere[i] in (side, "midline"))
            if not cand:
                cand = sorted(unvisited)
        d = np.linalg.norm(layout.coords[cand] - layout.coords[cur], axis=1)
        cur = cand[int(np.argmin(d))]
        unvisited.remove(cur)
        perm.append(cur)
        if layout.hemisphere[cur] != "midline":
            side = layout.hemisphere[cur]
    return ElectrodeOrder(perm=tuple(perm), strategy="dist-restr")


# ---------------------------------------------------------------------------
# UDS strategies

def mean_connectivity(mats: list[ConnectivityMatrix]) -> np.ndarray:
    """Element-wise mean over segments and bands; the UDS input matrix."""
    if not mats:
        raise ValueError("no matrices to average")
    return np.mean([m.values for m in mats], axis=0)


def disparity(c: np.ndarray, mode: str) -> DisparityMatrix:
    """Transform mean connectivity into target line-distances."""
    c = np.asarray(c, dtype=float)
    if mode == "global":
        d = 2.0 * (1.0 - c)
    elif mode == "local":
        d = c ** 2
    else:
        raise ValueError(f"unknown disparity mode {mode!r}")
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    return DisparityMatrix(values=d, mode=mode)


def uds_stress(emb: UdsEmbedding, d: DisparityMatrix) -> float:
    """Normalized stress: sum_{i<k} (|l_i - l_k| - delta_ik)^2 / sum delta^2."""
    l = emb.positions
    if l.shape[0] != d.n:
        raise DimensionError("embedding and disparity sizes differ")
    iu = np.triu_indices(d.n, 1)
    delta = d.values[iu]
    denom = float(np.sum(delta ** 2))
    if denom == 0:
        raise DegenerateDisparity("all-zero disparity matrix")
    dist = np.abs(l[:, None] - l[None, :])[iu]
    return float(np.sum((dist - delta) ** 2) / denom)


def _smacof_1d(delta: np.ndarray, init: np.ndarray):
    """1D stress majorization; returns (positions, stress trace)."""
    n = delta.shape[0]
    iu = np.triu_indices(n, 1)
    denom = float(np.sum(delta[iu] ** 2))
    l = init - init.mean()
    trace = []

    def norm_stress(pos):
        dist = np.abs(pos[:, None] - pos[None, :])
        return float(np.sum((dist[iu] - delta[iu]) ** 2) / denom)

    s = norm_stress(l)
    trace.append(s)
    for _ in range(SMACOF_MAX_ITER):
        dist = np.abs(l[:, None] - l[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            b = np.where(dist > 0, -delta / dist, 0.0)
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        l = (b @ l) / n
        l = l - l.mean()
        s_new = norm_stress(l)
        trace.append(s_new)
        if s - s_new < SMACOF_TOL:
            break
        s = s_new
    return l, trace


def _order_from_positions(l: np.ndarray) -> tuple[int, ...]:
    """Sort ascending, ties by original index."""
    return tuple(int(i) for i in np.lexsort((np.arange(len(l)), l)))


def order_embedding(order: tuple[int, ...], delta: np.ndarray):
    """Best 1D embedding consistent with a given order.

    Nonnegative least squares over the inter-neighbor gaps; the distance
    between order positions a < b is the sum of the gaps in between.
    Returns (positions, normalized stress).
    """
    n = len(order)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    a_mat = np.zeros((len(pairs), n - 1))
    rhs = np.empty(len(pairs))
    for row, (a, b) in enumerate(pairs):
        a_mat[row, a:b] = 1.0
        rhs[row] = delta[order[a], order[b]]
    gaps, _ = nnls(a_mat, rhs)
    denom = float(np.sum(rhs ** 2))
    if denom == 0:
        raise DegenerateDisparity("all-zero disparity matrix")
    resid = a_mat @ gaps - rhs
    stress = float(np.sum(resid ** 2) / denom)
    pos = np.empty(n)
    pos[list(order)] = np.concatenate([[0.0], np.cumsum(gaps)])
    return pos, stress


POLISH_FULL_LIMIT = 12  # full swap+insertion neighborhood up to this size


def _polish_candidates(cur: list, full: bool):
    n = len(cur)
    if full:
        for a in range(n):
            for b in range(a + 1, n):
                cand = cur.copy()
                cand[a], cand[b] = cand[b], cand[a]
                yield cand
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                cand = cur.copy()
                item = cand.pop(a)
                cand.insert(b, item)
                yield cand
    else:
        # adjacent transpositions only; keeps large-N polish tractable
        for a in range(n - 1):
            cand = cur.copy()
            cand[a], cand[a + 1] = cand[a + 1], cand[a]
            yield cand


def _polish_order(order: tuple[int, ...], delta: np.ndarray):
    """Local search over re-embedded orders (best-improvement)."""
    cur = list(order)
    _, cur_stress = order_embedding(tuple(cur), delta)
    full = len(cur) <= POLISH_FULL_LIMIT
    improved = True
    while improved:
        improved = False
        best = (cur_stress, None)
        for cand in _polish_candidates(cur, full):
            _, s = order_embedding(tuple(cand), delta)
            if s < best[0] - 1e-15:
                best = (s, cand)
        if best[1] is not None:
            cur_stress, cur = best
            improved = True
    return tuple(cur), cur_stress


def _classical_init(delta: np.ndarray) -> np.ndarray:
    """First coordinate of classical (Torgerson) scaling."""
    n = delta.shape[0]
    h = np.eye(n) - np.ones((n, n)) / n
    b = -h @ (delta ** 2) @ h / 2
    evals, evecs = np.linalg.eigh(b)
    top = np.argmax(evals)
    return evecs[:, top] * np.sqrt(max(evals[top], 0.0))


def uds_minimize(d: DisparityMatrix, restarts: int = DEFAULT_RESTARTS,
                 seed: int = 0, strategy: str = "data-global",
                 collect_traces: bool = False):
    """Minimize normalized stress; returns (UdsEmbedding, ElectrodeOrder).

    SMACOF from ``restarts`` random initializations plus a classical-scaling
    start; the best run's order (and the identity order) seed a swap /
    insertion local search over re-embedded orders. Deterministic for a
    fixed (d, restarts, seed). With ``collect_traces`` the per-run SMACOF
    stress traces are returned as a third element.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    delta = d.values
    n = d.n
    if float(np.sum(delta ** 2)) == 0:
        raise DegenerateDisparity("all-zero disparity matrix")
    rng = np.random.default_rng(seed)
    scale = max(delta.max(), 1.0)

    inits = [_classical_init(delta)]
    inits += [rng.normal(0.0, scale, size=n) for _ in range(restarts)]

    traces = []
    best_pos, best_stress = None, np.inf
    run_orders = []
    for init in inits:
        pos, trace = _smacof_1d(delta, init)
        traces.append(trace)
        run_orders.append(_order_from_positions(pos))
        if trace[-1] < best_stress - 1e-15:
            best_stress, best_pos = trace[-1], pos

    # combinatorial polish: every distinct run order plus the identity,
    # best candidates first
    seeds = sorted(set(run_orders) | {tuple(range(n))})
    seeds.sort(key=lambda o: order_embedding(o, delta)[1])
    n_seeds = MAX_POLISH_SEEDS if n <= POLISH_FULL_LIMIT else 3
    final_order, final_stress = None, np.inf
    for seed_order in seeds[:n_seeds]:
        o, s = _polish_order(seed_order, delta)
        if s < final_stress - 1e-15:
            final_order, final_stress = o, s

    pos, stress = order_embedding(final_order, delta)
    if best_stress < stress:
        # continuous solution beat the polished one; keep it
        pos, stress = best_pos, best_stress
        final_order = _order_from_positions(pos)

    # canonicalize reflection: lower original index at the front
    if final_order[0] > final_order[-1]:
        pos = -pos
        final_order = _order_from_positions(pos)

    emb = UdsEmbedding(positions=pos)
    order = ElectrodeOrder(perm=final_order, strategy=strategy,
                           stress=stress)
    if collect_traces:
        return emb, order, traces
    return emb, order


def order_from_connectivity(mats: list[ConnectivityMatrix], mode: str,
                            restarts: int = DEFAULT_RESTARTS,
                            seed: int = 0) -> ElectrodeOrder:
    """data-global / data-local ordering from averaged connectivity."""
    c = mean_connectivity(mats)
    d = disparity(c, mode)
    _, order = uds_minimize(d, restarts=restarts, seed=seed,
                            strategy=f"data-{mode}")
    return order


# ---------------------------------------------------------------------------

def apply_order(m: ConnectivityMatrix, o: ElectrodeOrder) -> ConnectivityMatrix:
    """Reindex both axes: out[a, b] = m[perm(a), perm(b)]."""
    if m.n_electrodes != len(o.perm):
        raise DimensionError(
            f"matrix is {m.n_electrodes}x{m.n_electrodes} but order has "
            f"{len(o.perm)} entries")
    idx = np.asarray(o.perm)
    return ConnectivityMatrix(measure=m.measure,
                              values=m.values[np.ix_(idx, idx)],
                              band=m.band, segment_start=m.segment_start,
                              n_evaluations=m.n_evaluations)


def save_order(o: ElectrodeOrder, names, path, seed=None) -> None:
    """Write ``rank,electrode_label`` lines with provenance comments."""
    names = list(names)
    with open(path, "w") as f:
        f.write(f"# strategy: {o.strategy}\n")
        if o.stress is not None:
            f.write(f"# stress: {o.stress:.12g}\n")
        if seed is not None:
            f.write(f"# seed: {seed}\n")
        for rank, idx in enumerate(o.perm):
            f.write(f"{rank},{names[idx]}\n")


def load_order(path, names) -> ElectrodeOrder:
    """Read an order file back against a known label list."""
    names = list(names)
    strategy, stress = "unknown", None
    entries = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                key = key.strip()
                if key == "strategy":
                    strategy = val.strip()
                elif key == "stress":
                    stress = float(val)
                continue
            rank_s, _, label = line.partition(",")
            label = label.strip()
            if label not in names:
                raise LayoutError(f"order file references unknown "
                                  f"electrode {label!r}")
            entries[int(rank_s)] = names.index(label)
    perm = tuple(entries[r] for r in range(len(entries)))
    return ElectrodeOrder(perm=perm, strategy=strategy, stress=stress)
