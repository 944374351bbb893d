"""Electrode layouts: labels, 2D scalp positions, and hemisphere tags.

The canonical 32-electrode montage ships with positions derived from the
idealized 10-20 sphere (vertex at Cz, outer ring at 72 degrees inclination,
intermediate 10-10 sites by spherical interpolation) projected to the unit
disk with the azimuthal equidistant projection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutError

#: DEAP channel order for the 32-channel montage.
CANONICAL_32 = (
    "Fp1", "AF3", "F3", "F7", "FC5", "FC1", "C3", "T7",
    "CP5", "CP1", "P3", "P7", "PO3", "O1", "Oz", "Pz",
    "Fp2", "AF4", "Fz", "F4", "F8", "FC6", "FC2", "Cz",
    "C4", "T8", "CP6", "CP2", "P4", "P8", "PO4", "O2",
)


def hemisphere_of(label: str) -> str:
    """Classify a 10-20 label: odd terminal digit -> left, even -> right,
    trailing 'z' -> midline."""
    tail = label.strip()[-1]
    if tail in ("z", "Z"):
        return "midline"
    if tail.isdigit():
        return "left" if int(tail) % 2 == 1 else "right"
    raise LayoutError(f"cannot infer hemisphere from label {label!r}")


@dataclass(frozen=True)
class ElectrodeLayout:
    """Ordered electrode labels with 2D scalp-projection coordinates."""

    names: tuple[str, ...]
    coords: np.ndarray  # (N_e, 2), values in [-1, 1]
    hemisphere: tuple[str, ...] = field(default=())

    def __post_init__(self):
        names = tuple(self.names)
        if len(names) < 2:
            raise LayoutError("layout needs at least 2 electrodes")
        if len(set(names)) != len(names):
            raise LayoutError("duplicate electrode labels")
        coords = np.asarray(self.coords, dtype=float)
        if coords.shape != (len(names), 2):
            raise LayoutError(
                f"coords shape {coords.shape} does not match {len(names)} names")
        hemi = self.hemisphere or tuple(hemisphere_of(n) for n in names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "hemisphere", tuple(hemi))

    @property
    def n_electrodes(self) -> int:
        return len(self.names)

    def index_of(self, label: str) -> int:
        try:
            return self.names.index(label)
        except ValueError:
            raise LayoutError(f"unknown electrode label {label!r}") from None


def _sph(inclination_deg: float, azimuth_deg: float) -> np.ndarray:
    """Unit-sphere point; inclination from vertex, azimuth from front midline
    (positive to the right)."""
    b = math.radians(inclination_deg)
    a = math.radians(azimuth_deg)
    return np.array([math.sin(b) * math.sin(a),
                     math.sin(b) * math.cos(a),
                     math.cos(b)])


def _mid(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Spherical midpoint (normalized chord midpoint)."""
    m = p + q
    return m / np.linalg.norm(m)


def _project(p: np.ndarray) -> tuple[float, float]:
    """Azimuthal equidistant projection; inclination 90 deg maps to radius 1."""
    b = math.acos(np.clip(p[2], -1.0, 1.0))
    a = math.atan2(p[0], p[1])
    r = b / (math.pi / 2)
    return (r * math.sin(a), r * math.cos(a))


def _build_canonical_coords() -> dict[str, tuple[float, float]]:
    s = {
        "Cz": _sph(0, 0),
        "Fz": _sph(36, 0), "Pz": _sph(36, 180), "Oz": _sph(72, 180),
        "Fp1": _sph(72, -18), "Fp2": _sph(72, 18),
        "F7": _sph(72, -54), "F8": _sph(72, 54),
        "T7": _sph(72, -90), "T8": _sph(72, 90),
        "P7": _sph(72, -126), "P8": _sph(72, 126),
        "O1": _sph(72, -162), "O2": _sph(72, 162),
    }
    s["F3"] = _mid(s["F7"], s["Fz"])
    s["F4"] = _mid(s["F8"], s["Fz"])
    s["C3"] = _mid(s["T7"], s["Cz"])
    s["C4"] = _mid(s["T8"], s["Cz"])
    s["P3"] = _mid(s["P7"], s["Pz"])
    s["P4"] = _mid(s["P8"], s["Pz"])
    s["AF3"] = _mid(s["Fp1"], s["F3"])
    s["AF4"] = _mid(s["Fp2"], s["F4"])
    s["PO3"] = _mid(s["O1"], s["P3"])
    s["PO4"] = _mid(s["O2"], s["P4"])
    s["FC5"] = _mid(_mid(s["F7"], s["F3"]), _mid(s["T7"], s["C3"]))
    s["FC6"] = _mid(_mid(s["F8"], s["F4"]), _mid(s["T8"], s["C4"]))
    s["FC1"] = _mid(_mid(s["F3"], s["Fz"]), _mid(s["C3"], s["Cz"]))
    s["FC2"] = _mid(_mid(s["F4"], s["Fz"]), _mid(s["C4"], s["Cz"]))
    s["CP5"] = _mid(_mid(s["T7"], s["C3"]), _mid(s["P7"], s["P3"]))
    s["CP6"] = _mid(_mid(s["T8"], s["C4"]), _mid(s["P8"], s["P4"]))
    s["CP1"] = _mid(_mid(s["C3"], s["Cz"]), _mid(s["P3"], s["Pz"]))
    s["CP2"] = _mid(_mid(s["C4"], s["Cz"]), _mid(s["P4"], s["Pz"]))
    return {name: _project(p) for name, p in s.items()}


_CANONICAL_COORDS = _build_canonical_coords()


def canonical_layout() -> ElectrodeLayout:
    """The embedded 32-electrode montage in DEAP channel order."""
    coords = np.array([_CANONICAL_COORDS[n] for n in CANONICAL_32])
    return ElectrodeLayout(names=CANONICAL_32, coords=coords)


def layout_from_names(names, coords=None) -> ElectrodeLayout:
    """Build a layout for arbitrary labels.

    Labels present in the canonical montage reuse its coordinates; otherwise
    ``coords`` must be supplied.
    """
    names = tuple(names)
    if coords is None:
        missing = [n for n in names if n not in _CANONICAL_COORDS]
        if missing:
            raise LayoutError(f"no embedded coordinates for {missing}")
        coords = np.array([_CANONICAL_COORDS[n] for n in names])
    return ElectrodeLayout(names=names, coords=np.asarray(coords, dtype=float))
