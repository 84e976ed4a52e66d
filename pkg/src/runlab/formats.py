"""NetPBM input, label image / feature table / tree output."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Union

import numpy as np

from .analysis import AdjacencyTree, ComponentRecord
from .lsl import check_image_size
from .model import BinaryImage, LabelImage

MAX_DIM = 2**31 - 1
FEATURE_COLUMNS = ["root", "parity", "parent", "s", "sx", "sy", "rmin", "rmax", "cmin", "cmax"]

_WS = b" \t\n\r\v\f"


class FormatError(ValueError):
    """Malformed or unsupported input, with the byte offset where it was found."""

    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)


class _Header:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            ch = data[self.pos:self.pos + 1]
            if ch == b"#":
                end = data.find(b"\n", self.pos)
                self.pos = n if end < 0 else end + 1
            elif ch in _WS:
                self.pos += 1
            else:
                break

    def integer(self, what: str) -> int:
        self.skip_space()
        start = self.pos
        while self.pos < len(self.data) and self.data[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if self.pos == start:
            raise FormatError(f"expected {what}", start)
        value = int(self.data[start:self.pos])
        if value < 1 or value > MAX_DIM:
            raise FormatError(f"{what} {value} out of range", start)
        return value


def read_pbm(data: Union[bytes, bytearray]) -> BinaryImage:
    """Decode a P1 (plain) or P4 (raw) PBM; black (1) is foreground."""
    data = bytes(data)
    magic = data[:2]
    if magic not in (b"P1", b"P4"):
        if len(magic) == 2 and magic[:1] == b"P":
            raise FormatError(f"unsupported format {magic.decode(errors='replace')}", 0)
        raise FormatError("not a PBM file", 0)
    hdr = _Header(data)
    hdr.pos = 2
    width = hdr.integer("width")
    height = hdr.integer("height")
    try:
        check_image_size(width, height)
    except OverflowError as exc:
        raise FormatError(str(exc), hdr.pos) from None
    if magic == b"P4":
        if hdr.pos >= len(data) or data[hdr.pos:hdr.pos + 1] not in _WS:
            raise FormatError("expected whitespace before raster", hdr.pos)
        start = hdr.pos + 1
        row_bytes = (width + 7) // 8
        need = row_bytes * height
        raster = data[start:start + need]
        if len(raster) < need:
            raise FormatError(
                f"truncated raster: need {need} bytes, got {len(raster)}", start + len(raster)
            )
        packed = np.frombuffer(raster, dtype=np.uint8).reshape(height, row_bytes)
        pixels = np.unpackbits(packed, axis=1)[:, :width]
        return BinaryImage(pixels)

    body = np.frombuffer(data, dtype=np.uint8)[hdr.pos:]
    keep = np.ones(len(body), dtype=bool)
    hashes = np.flatnonzero(body == ord("#"))
    pos = 0
    for k in hashes.tolist():
        if k < pos:
            continue
        end = data.find(b"\n", hdr.pos + k)
        pos = len(body) if end < 0 else end - hdr.pos + 1
        keep[k:pos] = False
    digit = keep & ((body == ord("0")) | (body == ord("1")))
    space = np.isin(body, np.frombuffer(_WS, dtype=np.uint8))
    bad = np.flatnonzero(keep & ~digit & ~space)
    idx = np.flatnonzero(digit)
    need = width * height
    if len(idx) < need:
        if len(bad):
            raise FormatError(f"invalid pixel character {chr(body[bad[0]])!r}", hdr.pos + int(bad[0]))
        raise FormatError(f"truncated raster: got {len(idx)} of {need} pixels", len(data))
    last = idx[need - 1]
    if len(bad) and bad[0] < last:
        raise FormatError(f"invalid pixel character {chr(body[bad[0]])!r}", hdr.pos + int(bad[0]))
    values = body[idx[:need]] - ord("0")
    return BinaryImage(values.reshape(height, width))


def write_pbm(image: BinaryImage, plain: bool = False) -> bytes:
    px = image.pixels
    h, w = px.shape
    if plain:
        lines = [f"P1\n{w} {h}\n"]
        # plain PBM lines should stay under 70 characters
        for row in px:
            for k in range(0, w, 34):
                lines.append(" ".join(str(v) for v in row[k:k + 34]) + "\n")
        return "".join(lines).encode("ascii")
    return f"P4\n{w} {h}\n".encode("ascii") + np.packbits(px, axis=1).tobytes()


def write_label_image(label_image: LabelImage, format: str = "pgm16") -> bytes:
    """Encode labels as 16-bit big-endian PGM (P5, maxval 65535) or CSV."""
    labels = label_image.labels
    h, w = labels.shape
    if format == "pgm16":
        top = int(labels.max()) if labels.size else 0
        if top > 65535:
            raise ValueError(
                f"label {top} does not fit in 16 bits; densify labels or use csv output"
            )
        header = f"P5\n{w} {h}\n65535\n".encode("ascii")
        return header + labels.astype(">u2").tobytes()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(labels.tolist())
        return buf.getvalue().encode("ascii")
    raise ValueError(f"unknown label image format {format!r}")


def read_pgm16(data: bytes) -> np.ndarray:
    """Decode a 16-bit P5 PGM as written by :func:`write_label_image`."""
    if data[:2] != b"P5":
        raise FormatError("not a P5 PGM file", 0)
    hdr = _Header(data)
    hdr.pos = 2
    w = hdr.integer("width")
    h = hdr.integer("height")
    maxval = hdr.integer("maxval")
    start = hdr.pos + 1
    dtype = ">u2" if maxval > 255 else "u1"
    size = np.dtype(dtype).itemsize * w * h
    raster = data[start:start + size]
    if len(raster) < size:
        raise FormatError("truncated raster", start + len(raster))
    return np.frombuffer(raster, dtype=dtype).reshape(h, w).astype(np.int64)


def _feature_fields(rec: ComponentRecord) -> list:
    f = rec.features
    if f is None:
        return [""] * 7
    if f.bbox is None:
        return [f.s, f.sx, f.sy, "", "", "", ""]
    return [f.s, f.sx, f.sy, *f.bbox]


def write_features_csv(records: Iterable[ComponentRecord]) -> bytes:
    """One line per component, ordered by root label."""
    records = sorted(records, key=lambda r: r.root)
    dense = any(r.dense is not None for r in records)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FEATURE_COLUMNS + (["dense"] if dense else []))
    for rec in records:
        row = [rec.root, rec.parity, "" if rec.parent_root is None else rec.parent_root]
        row += _feature_fields(rec)
        if dense:
            row.append(rec.dense)
        writer.writerow(row)
    return buf.getvalue().encode("ascii")


def _node_json(tree: AdjacencyTree, label: int) -> dict:
    rec = tree.nodes[label]
    f = rec.features
    return {
        "label": label,
        "parity": rec.parity,
        "s": None if f is None else f.s,
        "sx": None if f is None else f.sx,
        "sy": None if f is None else f.sy,
        "bbox": None if f is None or f.bbox is None else list(f.bbox),
        "children": [_node_json(tree, c) for c in sorted(tree.children.get(label, []))],
    }


def write_tree(tree: AdjacencyTree, format: str = "json") -> bytes:
    """Serialize the adjacency tree; DOT edges point from child to parent."""
    if format == "json":
        return (json.dumps(_node_json(tree, tree.root), indent=2) + "\n").encode("ascii")
    if format == "dot":
        lines = ["digraph adjacency_tree {"]
        for label, rec in sorted(tree.nodes.items()):
            shape = "box" if rec.parity == "FG" else "ellipse"
            lines.append(f'  {label} [label="{label} {rec.parity}", shape={shape}];')
        for child, parent in tree.edges():
            lines.append(f"  {child} -> {parent};")
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("ascii")
    raise ValueError(f"unknown tree format {format!r}")
