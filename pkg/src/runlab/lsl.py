"""Run-based black & white labeling with adjacency tree, features and hole filling.

The pipeline processes the image one row at a time:

1. ``encode_row`` turns a row into runs (even runs are background, odd runs
   are foreground; run 0 may be empty when the row starts with foreground).
2. ``unify_row`` links each run to the overlapping runs of the previous row
   of the same color, creating a new label (and recording the label on its
   left as its initial surrounding) when there is none.
3. ``transitive_closure`` flattens the equivalence table, merges features
   into roots, resolves the surrounding table, and optionally fills holes.
4. ``relabel`` writes the final labels back into a pixel grid.

The image is framed by a virtual exterior background: the row above row 0,
the columns beside the image, and the row below the last row all belong to
label 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .model import (
    AdjacencyTable,
    BinaryImage,
    EquivalenceTable,
    FeatureAccumulator,
    FeatureTable,
    INT64_MAX,
    LabelImage,
    LabelingConfig,
    LabelingResult,
    RowCode,
)

__all__ = [
    "PipelineState",
    "encode_row",
    "compute_segment_features",
    "find",
    "unify_row",
    "close_bottom_border",
    "transitive_closure",
    "relabel",
    "densify_map",
    "label_image",
    "check_image_size",
]


def encode_row(pixels, width: Optional[int] = None) -> RowCode:
    """Run-length code of a single row of 0/1 pixels."""
    x = np.ascontiguousarray(pixels, dtype=np.uint8)
    if width is not None and len(x) != width:
        raise ValueError(f"row has {len(x)} pixels, expected {width}")
    if len(x) < 1:
        raise ValueError("row must contain at least one pixel")
    er = np.empty(len(x), dtype=np.int64)
    rlc = np.empty(len(x) + 2, dtype=np.int64)
    ner = int(K.encode_row(x, er, rlc))
    return RowCode(er=er, rlc=rlc[: ner + 1].copy(), ner=ner)


def compute_segment_features(row: int, j0: int, j1: int) -> FeatureAccumulator:
    """Features of the run ``[j0, j1)`` on ``row`` in closed form."""
    if not 0 <= j0 < j1:
        raise ValueError(f"invalid segment [{j0}, {j1})")
    n = j1 - j0
    return FeatureAccumulator(n, n * (j0 + j1 - 1) // 2, row * n, (row, row, j0, j1 - 1))


def find(t, e: int) -> int:
    """Root of ``e`` in the parent array ``t`` (no path compression)."""
    if isinstance(t, EquivalenceTable):
        t = t.t
    while t[e] != e:
        e = t[e]
    return int(e)


def _virtual_top_row(width: int) -> RowCode:
    return RowCode(
        er=np.zeros(width, dtype=np.int64),
        rlc=np.array([0, width], dtype=np.int64),
        ner=1,
        era=np.zeros(1, dtype=np.int64),
    )


@dataclass
class PipelineState:
    """Mutable state of a row-by-row labeling run.

    ``prev_row_code`` starts as the virtual exterior row above the image.
    ``all_row_codes`` collects every unified row when ``retain_rows`` is set
    (needed by :func:`relabel`).
    """

    width: int
    config: LabelingConfig = field(default_factory=LabelingConfig)
    retain_rows: bool = False
    equivalences: EquivalenceTable = None
    adjacency: AdjacencyTable = None
    features: FeatureTable = None
    prev_row_code: RowCode = None
    cur_row_code: Optional[RowCode] = None
    all_row_codes: Optional[list] = None
    rows_done: int = 0

    def __post_init__(self):
        capacity = 2 * (self.width + 2)
        if self.equivalences is None:
            self.equivalences = EquivalenceTable.allocate(capacity)
        if self.adjacency is None:
            self.adjacency = AdjacencyTable.allocate(capacity)
        if self.features is None:
            self.features = FeatureTable.allocate(capacity)
        if self.prev_row_code is None:
            self.prev_row_code = _virtual_top_row(self.width)
        if self.retain_rows and self.all_row_codes is None:
            self.all_row_codes = []

    def ensure_capacity(self, n_labels: int) -> None:
        cap = self.equivalences.capacity
        if n_labels <= cap:
            return
        while cap < n_labels:
            cap *= 2
        self.equivalences.grow(cap)
        self.adjacency.grow(cap)
        self.features.grow(cap)

    def push_row(self, pixels) -> RowCode:
        """Encode and unify the next image row."""
        code = encode_row(pixels, self.width)
        self.cur_row_code = code
        unify_row(self, self.rows_done)
        return code


def unify_row(state: PipelineState, row_index: int,
              config: Optional[LabelingConfig] = None) -> PipelineState:
    """Unify ``state.cur_row_code`` (row ``row_index``) with the previous row."""
    config = config or state.config
    cur, prev = state.cur_row_code, state.prev_row_code
    if cur is None:
        raise ValueError("no current row code; call encode_row first")
    if prev.era is None:
        raise ValueError("previous row code has not been unified")
    eq, adj, feats = state.equivalences, state.adjacency, state.features
    state.ensure_capacity(eq.ne + cur.ner + 1)
    cur.era = np.zeros(cur.ner, dtype=np.int64)
    ne = K.unify_row(
        row_index, state.width, prev.er, prev.era, cur.rlc, cur.ner, cur.era,
        eq._t, eq._parity, adj._i, feats.data, eq.ne,
        config.connectivity.fg8, config.compute_features,
    )
    eq.ne = adj.ne = int(ne)
    if state.retain_rows:
        state.all_row_codes.append(cur)
    state.prev_row_code = cur
    state.cur_row_code = None
    state.rows_done = row_index + 1
    return state


def close_bottom_border(state: PipelineState) -> PipelineState:
    """Join the last row's background runs with the exterior below the image."""
    last = state.prev_row_code
    if last.era is None:
        raise ValueError("no unified row to close")
    K.close_bottom_border(last.era, last.ner, state.equivalences._t)
    return state


def transitive_closure(state: PipelineState, fill_holes: bool = False,
                       count_roots: bool = True) -> tuple[int, int]:
    """Resolve equivalences and surroundings in ascending label order.

    Returns the pre-fill ``(fg_count, hole_count)``.
    """
    eq, adj = state.equivalences, state.adjacency
    n_fg, n_bg = K.transitive_closure(
        eq._t, eq._parity, adj._i, state.features.data, eq.ne,
        fill_holes, state.config.compute_features, count_roots,
    )
    return int(n_fg), int(n_bg)


def densify_map(t: np.ndarray) -> np.ndarray:
    """Map each root label to its rank among roots; exterior stays 0."""
    t = np.asarray(t)
    is_root = t == np.arange(len(t))
    dense = np.cumsum(is_root) - 1
    return dense.astype(np.int64)


def relabel(all_row_codes, t, densify: bool = False) -> LabelImage:
    """Paint every run with the final root of its provisional label."""
    if all_row_codes is None:
        raise ValueError("row codes were not retained; label with relabel=True")
    if isinstance(t, EquivalenceTable):
        t = t.t
    t = np.asarray(t, dtype=np.int64)
    codes = list(all_row_codes)
    if not codes:
        raise ValueError("no row codes to relabel")
    h, w = len(codes), codes[0].width
    rlc_all = np.zeros((h, w + 2), dtype=np.int64)
    era_all = np.zeros((h, w + 1), dtype=np.int64)
    ner_all = np.zeros(h, dtype=np.int64)
    for i, code in enumerate(codes):
        if code.era is None:
            raise ValueError(f"row {i} has not been unified")
        rlc_all[i, : code.ner + 1] = code.rlc[: code.ner + 1]
        era_all[i, : code.ner] = code.era[: code.ner]
        ner_all[i] = code.ner
    return _relabel_arrays(rlc_all, era_all, ner_all, t, h, w, densify)


def _relabel_arrays(rlc_all, era_all, ner_all, t, h, w, densify):
    dmap = densify_map(t) if densify else np.zeros(1, dtype=np.int64)
    out = np.empty((h, w), dtype=np.int64)
    K.relabel(rlc_all, era_all, ner_all, t, dmap, densify, out)
    return LabelImage(out, densified=densify)


def check_image_size(width: int, height: int) -> None:
    """Reject images whose coordinate sums could overflow 64-bit accumulators."""
    if width * height * max(width, height) > INT64_MAX:
        raise OverflowError(
            f"{width}x{height} image exceeds the 64-bit feature accumulator range"
        )


def label_image(image, config: Optional[LabelingConfig] = None) -> LabelingResult:
    """Label foreground and background components of ``image`` in one scan."""
    config = config or LabelingConfig()
    if not isinstance(image, BinaryImage):
        image = BinaryImage(np.asarray(image))
    h, w = image.height, image.width
    check_image_size(w, h)
    t, parity, iadj, feats, ne, rlc_all, era_all, ner_all = K.scan(
        image.pixels, config.connectivity.fg8, config.compute_features,
        config.relabel, 2 * (w + 2),
    )
    ne = int(ne)
    n_fg, n_bg = K.transitive_closure(
        t, parity, iadj, feats, ne, config.fill_holes, config.compute_features,
        config.compute_euler,
    )
    result = LabelingResult(
        equivalences=EquivalenceTable(t, parity, ne),
        adjacency=AdjacencyTable(iadj, ne),
        config=config,
        width=w,
        height=h,
        features=FeatureTable(feats) if config.compute_features else None,
        holes_filled=config.fill_holes,
    )
    if config.compute_euler:
        result.fg_count, result.hole_count = int(n_fg), int(n_bg)
        result.euler = result.fg_count - result.hole_count
    if config.relabel:
        result.label_image = _relabel_arrays(
            rlc_all, era_all, ner_all, t[:ne], h, w, config.densify_labels
        )
        if config.densify_labels:
            result.dense_map = densify_map(t[:ne])
    return result
