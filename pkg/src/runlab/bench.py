"""Timing harness for density/granularity sweeps.

Times are reported in nanoseconds per pixel and, when a clock frequency is
given, in cycles per pixel (ns/px x GHz). Every cell (density, granularity)
is measured on ``seeds`` generated images. For each image, every variant is
run ``warmup`` times, then ``iterations`` rounds are timed round-robin and
the fastest round is kept. The report gives min/median/max of those
per-image times across seeds.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels as K
from .imagegen import GeneratorSpec, generate
from .lsl import label_image
from .model import BinaryImage, LabelingConfig

CSV_COLUMNS = [
    "d", "g", "config", "step",
    "min_ns_px", "med_ns_px", "max_ns_px",
    "min_cpp", "med_cpp", "max_cpp",
]

BASE = LabelingConfig(compute_features=False, compute_euler=False)
EXTRAS = {
    "euler": BASE.with_options(compute_euler=True),
    "fill": BASE.with_options(fill_holes=True),
    "features": BASE.with_options(compute_features=True),
    "relabel": BASE.with_options(relabel=True),
}
STEPS = ("encode", "unify", "closure", "relabel")


def parse_range(text: str) -> list[float]:
    """``"0:1:0.05"`` (inclusive) or ``"0,0.5,1"`` into a list of floats."""
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("range step must be positive")
        n = int(round((stop - start) / step))
        values = [round(start + k * step, 10) for k in range(n + 1)]
        return [v for v in values if v <= stop + 1e-12]
    return [float(v) for v in text.split(",") if v.strip()]


@dataclass
class BenchSpec:
    width: int = 2048
    height: int = 2048
    densities: Sequence[float] = field(default_factory=lambda: parse_range("0:1:0.05"))
    granularities: Sequence[int] = (1, 2, 4, 8, 16)
    seeds: int = 5
    seed_base: int = 0
    warmup: int = 1
    iterations: int = 3
    clock_ghz: Optional[float] = None
    require_cpp: bool = False
    extras: Sequence[str] = tuple(EXTRAS)
    steps: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.warmup < 0 or self.seeds < 1:
            raise ValueError("warmup must be >= 0 and seeds >= 1")
        if self.clock_ghz is not None and self.clock_ghz <= 0:
            raise ValueError("clock_ghz must be positive")
        if self.require_cpp and self.clock_ghz is None:
            raise ValueError("cycles per pixel requested but no clock frequency given")
        unknown = set(self.extras) - set(EXTRAS)
        if unknown:
            raise ValueError(f"unknown extras: {sorted(unknown)}")


@dataclass
class Stat:
    lo: float
    med: float
    hi: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "Stat":
        return cls(min(values), statistics.median(values), max(values))


@dataclass
class BenchRow:
    d: float
    g: int
    config: str
    step: str
    ns_px: Stat


@dataclass
class BenchReport:
    spec: BenchSpec
    rows: list[BenchRow] = field(default_factory=list)

    def get(self, d: float, g: int, config: str, step: str) -> BenchRow:
        for row in self.rows:
            if row.d == d and row.g == g and row.config == config and row.step == step:
                return row
        raise KeyError((d, g, config, step))


def _timed(fn: Callable):
    t0 = time.perf_counter_ns()
    out = fn()
    return out, time.perf_counter_ns() - t0


def time_config(image: BinaryImage, config: LabelingConfig):
    """One labeling run and its wall time in nanoseconds."""
    return _timed(lambda: label_image(image, config))


def time_steps(image: BinaryImage, config: LabelingConfig = BASE) -> dict[str, int]:
    """Nanoseconds spent in each pipeline step.

    Encoding is timed as a standalone pass over the rows; unification is
    the full scan minus that pass. Relabeling is timed on a separate scan
    that retains all row codes.
    """
    px = image.pixels
    h, w = px.shape
    fg8 = config.connectivity.fg8
    _, t_enc = _timed(lambda: K.encode_all(px))
    (t, parity, iadj, feats, ne, *_), t_scan = _timed(
        lambda: K.scan(px, fg8, config.compute_features, False, 2 * (w + 2))
    )
    _, t_clo = _timed(
        lambda: K.transitive_closure(
            t, parity, iadj, feats, ne, config.fill_holes, config.compute_features,
            config.compute_euler,
        )
    )
    # relabeling needs every row code; that scan is not part of the timing
    t, parity, iadj, feats, ne, rlc_all, era_all, ner_all = K.scan(
        px, fg8, False, True, 2 * (w + 2)
    )
    K.transitive_closure(t, parity, iadj, feats, ne, False, False, False)
    out = np.empty((h, w), dtype=np.int64)
    dmap = np.zeros(1, dtype=np.int64)
    _, t_rel = _timed(lambda: K.relabel(rlc_all, era_all, ner_all, t, dmap, False, out))
    return {
        "encode": t_enc,
        "unify": max(t_scan - t_enc, 0),
        "closure": t_clo,
        "relabel": t_rel,
    }


def _measure_image(image: BinaryImage, spec: BenchSpec) -> dict[tuple[str, str], float]:
    variants = {"base": BASE, **{name: EXTRAS[name] for name in spec.extras}}
    best: dict[tuple[str, str], float] = {}

    def keep(key, ns):
        best[key] = min(best.get(key, float("inf")), ns)

    for _ in range(spec.warmup):
        for cfg in variants.values():
            time_config(image, cfg)
        if spec.steps:
            time_steps(image)
    for _ in range(spec.iterations):
        for name, cfg in variants.items():
            keep((name, "total"), time_config(image, cfg)[1])
        if spec.steps:
            for step, ns in time_steps(image).items():
                keep(("base", step), ns)
    for name in spec.extras:
        best[(name, "delta")] = best[(name, "total")] - best[("base", "total")]
    return best


def run(spec: BenchSpec, progress: Optional[Callable[[str], None]] = None) -> BenchReport:
    report = BenchReport(spec)
    npx = spec.width * spec.height
    for g in spec.granularities:
        for d in spec.densities:
            per_seed: dict[tuple[str, str], list[float]] = {}
            for k in range(spec.seeds):
                image = generate(GeneratorSpec(spec.width, spec.height, d, g, spec.seed_base + k))
                for key, ns in _measure_image(image, spec).items():
                    per_seed.setdefault(key, []).append(ns / npx)
            for (config, step), values in sorted(per_seed.items(), key=_row_order):
                report.rows.append(BenchRow(d, g, config, step, Stat.of(values)))
            if progress:
                base = statistics.median(per_seed[("base", "total")])
                progress(f"d={d:g} g={g}: base {base:.2f} ns/px")
    return report


def _row_order(item):
    (config, step), _ = item
    configs = ["base", *EXTRAS]
    steps = [*STEPS, "total", "delta"]
    return configs.index(config), steps.index(step)


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.4f}"


def export_csv(report: BenchReport) -> bytes:
    ghz = report.spec.clock_ghz
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        st = row.ns_px
        cpp = [None] * 3 if ghz is None else [st.lo * ghz, st.med * ghz, st.hi * ghz]
        writer.writerow(
            [f"{row.d:g}", row.g, row.config, row.step, _fmt(st.lo), _fmt(st.med), _fmt(st.hi)]
            + [_fmt(v) for v in cpp]
        )
    return buf.getvalue().encode("ascii")


def read_csv(data: bytes) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(data.decode("ascii"))))
