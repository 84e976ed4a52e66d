"""Shared data types for the run-based black & white labeling engine."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

# Stored in the adjacency array for the exterior label, which has no parent.
NONE = -1

INT64_MAX = np.iinfo(np.int64).max

# Column layout of the feature matrix (one row per label).
F_S, F_SX, F_SY, F_RMIN, F_RMAX, F_CMIN, F_CMAX = range(7)
N_FEATURES = 7
_EMPTY_ROW = (0, 0, 0, INT64_MAX, -1, INT64_MAX, -1)


class Connectivity(str, enum.Enum):
    """Adjacency pair: foreground 8 / background 4, or the complement."""

    FG8_BG4 = "fg8bg4"
    FG4_BG8 = "fg4bg8"

    @property
    def fg8(self) -> bool:
        return self is Connectivity.FG8_BG4


def as_connectivity(value) -> Connectivity:
    if isinstance(value, Connectivity):
        return value
    try:
        return Connectivity(str(value).lower())
    except ValueError:
        raise ValueError(
            f"unknown connectivity {value!r}; expected 'fg8bg4' or 'fg4bg8'"
        ) from None


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """A binary pixel grid, 0 = background, 1 = foreground, row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D pixel grid, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image must be at least 1x1, got {px.shape}")
        if px.dtype == np.bool_:
            px = px.astype(np.uint8)
        elif not np.all((px == 0) | (px == 1)):
            raise ValueError("pixels must be 0 or 1")
        object.__setattr__(self, "pixels", np.ascontiguousarray(px, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows) -> "BinaryImage":
        return cls(np.array(rows, dtype=np.uint8))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height}, fg={int(self.pixels.sum())})"


@dataclass
class RowCode:
    """Run-length code of one row.

    ``er[j]`` is the relative (per-row) segment index of column ``j``;
    segment ``k`` covers ``rlc[k] <= j < rlc[k + 1]`` and is foreground iff
    ``k`` is odd. ``era[k]`` is the absolute label given to segment ``k``
    during unification.
    """

    er: np.ndarray
    rlc: np.ndarray
    ner: int
    era: Optional[np.ndarray] = None

    @property
    def width(self) -> int:
        return len(self.er)

    def segments(self):
        """Yield ``(k, j0, j1)`` for every non-empty segment."""
        for k in range(self.ner):
            j0, j1 = int(self.rlc[k]), int(self.rlc[k + 1])
            if j1 > j0:
                yield k, j0, j1


@dataclass(frozen=True)
class FeatureAccumulator:
    """Pixel count, coordinate sums and inclusive bounding box of a region.

    ``bbox`` is ``(row_min, row_max, col_min, col_max)``; it is ``None`` only
    for the empty accumulator, which the exterior label carries when no
    border-connected background pixel exists.
    """

    s: int
    sx: int
    sy: int
    bbox: Optional[tuple[int, int, int, int]]

    @classmethod
    def empty(cls) -> "FeatureAccumulator":
        return cls(0, 0, 0, None)

    @property
    def centroid(self) -> Optional[tuple[float, float]]:
        """(row, col) center of mass."""
        if self.s == 0:
            return None
        return self.sy / self.s, self.sx / self.s


def merge_features(a: FeatureAccumulator, b: FeatureAccumulator) -> FeatureAccumulator:
    """Union of two accumulators: sums add, bounding boxes take the envelope."""
    if a.s == 0 or b.s == 0:
        raise ValueError("cannot merge an empty feature accumulator")
    s, sx, sy = a.s + b.s, a.sx + b.sx, a.sy + b.sy
    if max(s, sx, sy) > INT64_MAX:
        raise OverflowError(
            "feature sums exceed 64 bits; the input image is larger than supported"
        )
    (ar0, ar1, ac0, ac1), (br0, br1, bc0, bc1) = a.bbox, b.bbox
    return FeatureAccumulator(
        s, sx, sy, (min(ar0, br0), max(ar1, br1), min(ac0, bc0), max(ac1, bc1))
    )


class FeatureTable:
    """Per-label feature accumulators stored as an ``(n, 7)`` int64 matrix."""

    def __init__(self, data: np.ndarray):
        self.data = data

    @classmethod
    def allocate(cls, capacity: int) -> "FeatureTable":
        data = np.empty((capacity, N_FEATURES), dtype=np.int64)
        data[:] = _EMPTY_ROW
        return cls(data)

    def grow(self, capacity: int) -> None:
        old = self.data
        if capacity <= len(old):
            return
        self.data = np.empty((capacity, N_FEATURES), dtype=np.int64)
        self.data[: len(old)] = old
        self.data[len(old):] = _EMPTY_ROW

    def __len__(self):
        return len(self.data)

    def __getitem__(self, label: int) -> FeatureAccumulator:
        row = self.data[label]
        if row[F_S] == 0:
            return FeatureAccumulator.empty()
        return FeatureAccumulator(
            int(row[F_S]),
            int(row[F_SX]),
            int(row[F_SY]),
            (int(row[F_RMIN]), int(row[F_RMAX]), int(row[F_CMIN]), int(row[F_CMAX])),
        )

    def copy(self) -> "FeatureTable":
        return FeatureTable(self.data.copy())


class EquivalenceTable:
    """Union-find parent array with min-union discipline and per-label parity.

    Label 0 is the exterior background and exists from the start. Arrays are
    over-allocated and grown geometrically; only ``t[:ne]`` is meaningful.
    """

    def __init__(self, t: np.ndarray, parity: np.ndarray, ne: int):
        self._t = t
        self._parity = parity
        self.ne = ne

    @classmethod
    def allocate(cls, capacity: int = 64) -> "EquivalenceTable":
        capacity = max(capacity, 1)
        t = np.zeros(capacity, dtype=np.int64)
        parity = np.zeros(capacity, dtype=np.uint8)
        return cls(t, parity, 1)

    @property
    def capacity(self) -> int:
        return len(self._t)

    def grow(self, capacity: int) -> None:
        if capacity <= len(self._t):
            return
        t = np.zeros(capacity, dtype=np.int64)
        t[: self.ne] = self._t[: self.ne]
        parity = np.zeros(capacity, dtype=np.uint8)
        parity[: self.ne] = self._parity[: self.ne]
        self._t, self._parity = t, parity

    @property
    def t(self) -> np.ndarray:
        return self._t[: self.ne]

    @property
    def parity(self) -> np.ndarray:
        return self._parity[: self.ne]

    def roots(self) -> np.ndarray:
        t = self.t
        return np.flatnonzero(t == np.arange(self.ne))

    def copy(self) -> "EquivalenceTable":
        return EquivalenceTable(self._t.copy(), self._parity.copy(), self.ne)

    def __repr__(self):
        return f"EquivalenceTable(ne={self.ne}, t={self.t.tolist()})"


class AdjacencyTable:
    """Surrounding relation: ``i[e]`` is a label of the component around ``e``.

    ``i[0]`` holds :data:`NONE`. Entries are meaningful only at root labels.
    """

    def __init__(self, i: np.ndarray, ne: int):
        self._i = i
        self.ne = ne

    @classmethod
    def allocate(cls, capacity: int = 64) -> "AdjacencyTable":
        i = np.zeros(max(capacity, 1), dtype=np.int64)
        i[0] = NONE
        return cls(i, 1)

    def grow(self, capacity: int) -> None:
        if capacity <= len(self._i):
            return
        i = np.zeros(capacity, dtype=np.int64)
        i[: len(self._i)] = self._i
        self._i = i

    @property
    def i(self) -> np.ndarray:
        return self._i[: self.ne]

    def parent(self, label: int) -> Optional[int]:
        p = int(self._i[label])
        return None if p == NONE else p

    def copy(self) -> "AdjacencyTable":
        return AdjacencyTable(self._i.copy(), self.ne)


@dataclass
class LabelImage:
    """Per-pixel final labels, shape ``(height, width)``."""

    labels: np.ndarray
    densified: bool = False

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True)
class LabelingConfig:
    connectivity: Connectivity = Connectivity.FG8_BG4
    fill_holes: bool = False
    compute_features: bool = True
    relabel: bool = False
    densify_labels: bool = False
    compute_euler: bool = True

    def __post_init__(self):
        object.__setattr__(self, "connectivity", as_connectivity(self.connectivity))
        if self.densify_labels and not self.relabel:
            raise ValueError("densify_labels requires relabel")

    def with_options(self, **changes) -> "LabelingConfig":
        return replace(self, **changes)


@dataclass
class LabelingResult:
    """Everything one labeling run produces.

    ``fg_count`` and ``hole_count`` are pre-fill root counts, so ``euler``
    stays the Euler number of the input even when holes were filled.
    """

    equivalences: EquivalenceTable
    adjacency: AdjacencyTable
    config: LabelingConfig
    width: int
    height: int
    features: Optional[FeatureTable] = None
    label_image: Optional[LabelImage] = None
    fg_count: Optional[int] = None
    hole_count: Optional[int] = None
    euler: Optional[int] = None
    holes_filled: bool = False
    dense_map: Optional[np.ndarray] = field(default=None, repr=False)

    def roots(self) -> np.ndarray:
        return self.equivalences.roots()

    def root_of(self, label: int) -> int:
        return int(self.equivalences.t[label])

    def parity_of(self, label: int) -> int:
        return int(self.equivalences.parity[label])

    def copy(self) -> "LabelingResult":
        return LabelingResult(
            equivalences=self.equivalences.copy(),
            adjacency=self.adjacency.copy(),
            config=self.config,
            width=self.width,
            height=self.height,
            features=None if self.features is None else self.features.copy(),
            label_image=None
            if self.label_image is None
            else LabelImage(self.label_image.labels.copy(), self.label_image.densified),
            fg_count=self.fg_count,
            hole_count=self.hole_count,
            euler=self.euler,
            holes_filled=self.holes_filled,
            dense_map=None if self.dense_map is None else self.dense_map.copy(),
        )
