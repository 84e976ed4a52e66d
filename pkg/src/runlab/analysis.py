"""Queries over a finished labeling: components, holes, the adjacency tree,
the Euler number, and feature-driven component filtering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from . import _kernels as K
from .lsl import densify_map
from .model import FeatureAccumulator, LabelImage, LabelingResult

FG, BG = "FG", "BG"


@dataclass(frozen=True)
class ComponentRecord:
    root: int
    parity: str
    parent_root: Optional[int]
    features: Optional[FeatureAccumulator]
    depth: int
    dense: Optional[int] = None

    @property
    def is_fg(self) -> bool:
        return self.parity == FG

    @property
    def is_exterior(self) -> bool:
        return self.root == 0


def components(result: LabelingResult) -> list[ComponentRecord]:
    """One record per surviving root, exterior first, ascending by label."""
    eq, adj = result.equivalences, result.adjacency
    roots = eq.roots()
    depth: dict[int, int] = {}
    dense = densify_map(eq.t) if result.dense_map is not None else None
    records = []
    for r in roots.tolist():
        parent = adj.parent(r) if r else None
        # parents carry smaller labels, so their depth is already known
        depth[r] = 0 if parent is None else depth[parent] + 1
        feats = result.features[r] if result.features is not None else None
        records.append(
            ComponentRecord(
                root=r,
                parity=FG if eq.parity[r] else BG,
                parent_root=parent,
                features=feats,
                depth=depth[r],
                dense=None if dense is None else int(dense[r]),
            )
        )
    return records


def holes(result: LabelingResult) -> list[ComponentRecord]:
    """Background components enclosed by foreground (every BG root but 0)."""
    if result.holes_filled:
        raise ValueError("holes were filled during labeling; relabel without fill_holes")
    return [c for c in components(result) if c.parity == BG and c.root != 0]


@dataclass
class AdjacencyTree:
    """Inclusion tree over surviving roots, rooted at the exterior 0."""

    nodes: dict[int, ComponentRecord]
    children: dict[int, list[int]] = field(default_factory=dict)

    @property
    def root(self) -> int:
        return 0

    def parent(self, label: int) -> Optional[int]:
        return self.nodes[label].parent_root

    def edges(self) -> list[tuple[int, int]]:
        """``(child, parent)`` pairs sorted by child label."""
        return [
            (n, rec.parent_root)
            for n, rec in sorted(self.nodes.items())
            if rec.parent_root is not None
        ]

    def walk(self, start: int = 0) -> Iterator[ComponentRecord]:
        stack = [start]
        while stack:
            n = stack.pop()
            yield self.nodes[n]
            stack.extend(reversed(self.children.get(n, [])))

    def depth(self) -> int:
        return max(rec.depth for rec in self.nodes.values())


def adjacency_tree(result: LabelingResult) -> AdjacencyTree:
    records = components(result)
    nodes = {rec.root: rec for rec in records}
    children: dict[int, list[int]] = {rec.root: [] for rec in records}
    for rec in records:
        if rec.parent_root is not None:
            children[rec.parent_root].append(rec.root)
    return AdjacencyTree(nodes=nodes, children=children)


def euler_number(result: LabelingResult) -> int:
    if result.euler is not None:
        return result.euler
    if result.holes_filled:
        raise ValueError("Euler number was not computed before holes were filled")
    recs = components(result)
    fg = sum(1 for r in recs if r.parity == FG)
    bg = sum(1 for r in recs if r.parity == BG and r.root != 0)
    return fg - bg


def filter_components(
    result: LabelingResult, predicate: Callable[[ComponentRecord], bool]
) -> LabelingResult:
    """Merge every component selected by ``predicate`` into its surrounding one.

    The predicate sees the records of the input result. Selected roots are
    processed in ascending label order. When a component disappears, its
    children of the surviving parent's color join the parent too (they now
    touch it); the others are re-attached to the parent. The input result is
    left untouched.
    """
    selected = [rec.root for rec in components(result) if predicate(rec)]
    if 0 in selected:
        raise ValueError("the exterior component cannot be filtered out")
    out = result.copy()
    if not selected:
        return out
    eq, adj = out.equivalences, out.adjacency
    t, iadj, parity = eq.t, adj.i, eq.parity
    feats = out.features.data if out.features is not None else None
    old_t = result.equivalences.t

    roots = eq.roots().tolist()
    children: dict[int, list[int]] = {r: [] for r in roots}
    for r in roots[1:]:
        children[int(iadj[r])].append(r)
    owner: dict[int, int] = {}

    def resolve(x: int) -> int:
        while x in owner:
            x = owner[x]
        return x

    for e in selected:
        if e in owner:
            continue  # already absorbed through an earlier merge
        p = resolve(int(iadj[e]))
        stack = [e]
        while stack:
            x = stack.pop()
            owner[x] = p
            if feats is not None:
                K._merge_rows(feats, p, x)
            for c in children[x]:
                if c in owner:
                    continue
                if parity[c] == parity[p]:
                    stack.append(c)
                else:
                    iadj[c] = p
                    children[p].append(c)

    rmap = np.arange(len(t))
    for x in owner:
        rmap[x] = resolve(x)
    t[:] = rmap[t]

    recs = components(out)
    out.fg_count = sum(1 for r in recs if r.parity == FG)
    out.hole_count = sum(1 for r in recs if r.parity == BG and r.root != 0)
    out.euler = out.fg_count - out.hole_count
    if out.label_image is not None:
        labels = out.label_image.labels
        if out.label_image.densified:
            roots_before = np.flatnonzero(old_t == np.arange(len(old_t)))
            labels = roots_before[labels]
        labels = t[labels]
        if out.label_image.densified:
            out.dense_map = densify_map(t)
            labels = out.dense_map[labels]
        out.label_image = LabelImage(labels, densified=out.label_image.densified)
    return out


def to_binary(result: LabelingResult) -> np.ndarray:
    """Pixel image recovered from the label image: 1 where the label is FG.

    Labels that absorbed other components (filled holes, filtered regions)
    take the color of the component they were merged into.
    """
    if result.label_image is None:
        raise ValueError("result has no label image; label with relabel=True")
    eq = result.equivalences
    labels = result.label_image.labels
    if result.label_image.densified:
        labels = eq.roots()[labels]
    return eq.parity[labels].astype(np.uint8)
