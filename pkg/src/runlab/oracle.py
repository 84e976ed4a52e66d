"""Brute-force reference implementations for testing the labeling engine.

Nothing here shares code with the run-based pipeline: components come from a
breadth-first flood fill over a padded pixel grid, the Euler number from
2x2 pattern counts, and holes from a flood fill seeded at the frame.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .model import BinaryImage, Connectivity, as_connectivity

EXTERIOR = 0

_N4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_N8 = _N4 + ((-1, -1), (-1, 1), (1, -1), (1, 1))


def _pixels(image) -> np.ndarray:
    if isinstance(image, BinaryImage):
        return image.pixels
    return BinaryImage(np.asarray(image)).pixels


def _neighbours(connectivity: Connectivity, value: int):
    fg8 = connectivity.fg8
    if value:
        return _N8 if fg8 else _N4
    return _N4 if fg8 else _N8


@dataclass
class OraclePartition:
    """Component id per pixel.

    Id 0 is the exterior: the virtual background frame plus every background
    pixel connected to it. Other ids follow the raster order of each
    component's first pixel.
    """

    comp: np.ndarray
    parity: np.ndarray
    connectivity: Connectivity

    @property
    def n_components(self) -> int:
        return len(self.parity)

    def first_pixels(self) -> dict[int, tuple[int, int]]:
        flat = self.comp.ravel()
        ids, idx = np.unique(flat, return_index=True)
        w = self.comp.shape[1]
        return {int(c): (int(k) // w, int(k) % w) for c, k in zip(ids, idx)}


def flood_label(image, connectivity=Connectivity.FG8_BG4) -> OraclePartition:
    """Label components by BFS over the image padded with a background frame."""
    conn = as_connectivity(connectivity)
    px = _pixels(image)
    h, w = px.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = px
    comp = np.full((h + 2, w + 2), -1, dtype=np.int64)
    parities = []

    def flood(r0, c0, cid):
        value = padded[r0, c0]
        steps = _neighbours(conn, value)
        comp[r0, c0] = cid
        queue = deque([(r0, c0)])
        while queue:
            r, c = queue.popleft()
            for dr, dc in steps:
                rr, cc = r + dr, c + dc
                if 0 <= rr < h + 2 and 0 <= cc < w + 2:
                    if comp[rr, cc] < 0 and padded[rr, cc] == value:
                        comp[rr, cc] = cid
                        queue.append((rr, cc))

    flood(0, 0, EXTERIOR)
    parities.append(0)
    for r in range(1, h + 1):
        for c in range(1, w + 1):
            if comp[r, c] < 0:
                cid = len(parities)
                parities.append(int(padded[r, c]))
                flood(r, c, cid)
    return OraclePartition(
        comp=comp[1:-1, 1:-1].copy(),
        parity=np.array(parities, dtype=np.uint8),
        connectivity=conn,
    )


def oracle_adjacency_tree(partition: OraclePartition) -> dict[int, int | None]:
    """Parent of each component: the component left of its first pixel."""
    parents: dict[int, int | None] = {EXTERIOR: None}
    for cid, (r, c) in sorted(partition.first_pixels().items()):
        if cid == EXTERIOR:
            continue
        parents[cid] = EXTERIOR if c == 0 else int(partition.comp[r, c - 1])
    return parents


def bitquad_counts(image) -> tuple[int, int, int]:
    """(Q1, Q3, QD) over all 2x2 windows of the background-padded image."""
    px = _pixels(image)
    h, w = px.shape
    p = np.zeros((h + 2, w + 2), dtype=np.int64)
    p[1:-1, 1:-1] = px
    a, b = p[:-1, :-1], p[:-1, 1:]
    c, d = p[1:, :-1], p[1:, 1:]
    total = a + b + c + d
    q1 = int(np.count_nonzero(total == 1))
    q3 = int(np.count_nonzero(total == 3))
    qd = int(np.count_nonzero((total == 2) & (a == d)))
    return q1, q3, qd


def bitquad_euler(image, connectivity=Connectivity.FG8_BG4) -> int:
    """Euler number from Gray's bit-quad counts."""
    conn = as_connectivity(connectivity)
    q1, q3, qd = bitquad_counts(image)
    num = q1 - q3 - 2 * qd if conn.fg8 else q1 - q3 + 2 * qd
    if num % 4:
        raise AssertionError(f"bit-quad sum {num} is not divisible by 4")
    return num // 4


def oracle_fill_holes(image, connectivity=Connectivity.FG8_BG4) -> BinaryImage:
    """Turn every background pixel not reachable from the frame into foreground."""
    part = flood_label(image, connectivity)
    px = _pixels(image)
    filled = np.where((px == 0) & (part.comp != EXTERIOR), 1, px).astype(np.uint8)
    return BinaryImage(filled)


def oracle_features(partition: OraclePartition) -> dict[int, tuple]:
    """Per component ``(s, sx, sy, (rmin, rmax, cmin, cmax))`` by direct summation.

    Components with no pixel inside the image (an exterior that is all frame)
    get ``(0, 0, 0, None)``.
    """
    comp = partition.comp.ravel()
    h, w = partition.comp.shape
    n = partition.n_components
    rows, cols = np.divmod(np.arange(h * w, dtype=np.int64), w)
    s = np.bincount(comp, minlength=n)
    sx = np.zeros(n, dtype=np.int64)
    sy = np.zeros(n, dtype=np.int64)
    np.add.at(sx, comp, cols)
    np.add.at(sy, comp, rows)
    big = np.iinfo(np.int64).max
    rmin = np.full(n, big)
    cmin = np.full(n, big)
    rmax = np.full(n, -1)
    cmax = np.full(n, -1)
    np.minimum.at(rmin, comp, rows)
    np.maximum.at(rmax, comp, rows)
    np.minimum.at(cmin, comp, cols)
    np.maximum.at(cmax, comp, cols)
    out = {}
    for cid in range(n):
        bbox = None
        if s[cid]:
            bbox = (int(rmin[cid]), int(rmax[cid]), int(cmin[cid]), int(cmax[cid]))
        out[cid] = (int(s[cid]), int(sx[cid]), int(sy[cid]), bbox)
    return out


def oracle_euler(partition: OraclePartition) -> int:
    """#foreground components minus #non-exterior background components."""
    fg = int(np.count_nonzero(partition.parity == 1))
    bg = int(np.count_nonzero(partition.parity == 0)) - 1
    return fg - bg
