"""Acceptance gate: one PASS/FAIL line per criterion, printed in the summary.

Run on its own with ``pytest tests/test_acceptance.py -v``. The benchmark
criterion times 18 images of 2048x2048 and takes about ten seconds.
"""

import time

import numpy as np
import pytest

from runlab import bench
from runlab.cli import main
from runlab.imagegen import GeneratorSpec, generate
from runlab.lsl import PipelineState, label_image
from runlab.model import LabelingConfig
from runlab.analysis import adjacency_tree, components, euler_number
from runlab.oracle import (
    bitquad_euler,
    flood_label,
    oracle_adjacency_tree,
    oracle_features,
    oracle_fill_holes,
)

from conftest import ACCEPTANCE_LINES, WORKED

MODES = ("fg8bg4", "fg4bg8")
N_IMAGES = 1100
CORPUS_BUDGET_S = 60.0
BENCH_BUDGET_S = 600.0


def record(tag, ok, text, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {tag} {text}"
    if detail:
        line += f" ({detail})"
    ACCEPTANCE_LINES.append(line)
    return ok


def corpus_images():
    rng = np.random.default_rng(20240601)
    densities = [round(0.1 * k, 1) for k in range(11)]
    for k in range(N_IMAGES):
        h, w = (int(v) for v in rng.integers(1, 65, 2))
        g = min(int(rng.choice([1, 2, 4, 8])), h, w)
        d = densities[k % len(densities)]
        yield generate(GeneratorSpec(w, h, d, g, seed=k)).pixels


def check_image(img, conn):
    """Mismatch tags for criteria 1-5 on one image and one mode."""
    bad = set()
    cfg = LabelingConfig(connectivity=conn, relabel=True, densify_labels=True)
    r = label_image(img, cfg)
    part = flood_label(img, conn)

    if not np.array_equal(r.label_image.labels, part.comp):
        bad.add("C1")

    dm, roots = r.dense_map, r.roots()
    engine_tree = {
        int(dm[x]): None if x == 0 else int(dm[r.adjacency.i[x]]) for x in roots.tolist()
    }
    if engine_tree != oracle_adjacency_tree(part):
        bad.add("C2")

    if not (r.euler == r.fg_count - r.hole_count == bitquad_euler(img, conn)):
        bad.add("C3")

    of = oracle_features(part)
    total = 0
    for x in roots.tolist():
        f = r.features[x]
        total += f.s
        if (f.s, f.sx, f.sy, f.bbox) != of[int(dm[x])]:
            bad.add("C4")
    if total != img.size:
        bad.add("C4")

    rf = label_image(img, cfg.with_options(fill_holes=True))
    pf = flood_label(oracle_fill_holes(img, conn).pixels, conn)
    if not np.array_equal(rf.label_image.labels, pf.comp):
        bad.add("C5")
    # each surviving FG root absorbs exactly what it enclosed
    tree = adjacency_tree(r)
    for rec in tree.nodes.values():
        if rec.parity != "FG" or rec.root not in rf.roots():
            continue
        enclosed = sum(n.features.s for n in tree.walk(rec.root))
        if rf.features[rec.root].s != enclosed:
            bad.add("C5")
    return bad


@pytest.fixture(scope="module")
def corpus_report():
    t0 = time.perf_counter()
    mismatches = {c: 0 for c in ("C1", "C2", "C3", "C4", "C5")}
    runs = 0
    for img in corpus_images():
        for conn in MODES:
            runs += 1
            for tag in check_image(img, conn):
                mismatches[tag] += 1
    return mismatches, runs, time.perf_counter() - t0


def test_c1_partition_matches_flood_fill(corpus_report):
    mismatches, runs, elapsed = corpus_report
    ok = mismatches["C1"] == 0 and elapsed < CORPUS_BUDGET_S
    record("C1", ok, "FG/BG partition equals flood labeling",
           f"{N_IMAGES} images x {len(MODES)} modes, {mismatches['C1']} mismatches, "
           f"corpus {elapsed:.1f}s < {CORPUS_BUDGET_S:.0f}s")
    assert mismatches["C1"] == 0
    assert elapsed < CORPUS_BUDGET_S


def test_c2_adjacency_tree_matches_oracle(corpus_report):
    mismatches, runs, _ = corpus_report
    ok = mismatches["C2"] == 0
    record("C2", ok, "root-parent map equals oracle tree", f"{runs} runs, {mismatches['C2']} mismatches")
    assert ok


def test_c3_euler_triple_identity(corpus_report):
    mismatches, runs, _ = corpus_report
    ok = mismatches["C3"] == 0
    record("C3", ok, "euler = fg_count - hole_count = bit-quad euler",
           f"{runs} runs, {mismatches['C3']} mismatches")
    assert ok


def test_c4_features_exact(corpus_report):
    mismatches, runs, _ = corpus_report
    ok = mismatches["C4"] == 0
    record("C4", ok, "s/sx/sy/bbox equal oracle and sum of S is w*h",
           f"{runs} runs, {mismatches['C4']} mismatches")
    assert ok


def test_c5_hole_fill_equivalence(corpus_report):
    mismatches, runs, _ = corpus_report
    ok = mismatches["C5"] == 0
    record("C5", ok, "fill-then-relabel equals flood labeling of filled image",
           f"{runs} runs, {mismatches['C5']} mismatches")
    assert ok


def worked_events():
    state = PipelineState(WORKED.shape[1], LabelingConfig())
    merges = {}
    for i, row in enumerate(WORKED):
        before = state.equivalences.t.copy()
        state.push_row(row)
        t = state.equivalences.t
        merges[i] = sorted((e, int(t[e])) for e in range(len(before)) if t[e] != before[e])
    return merges


def test_c6_worked_golden():
    merges = {i: m for i, m in worked_events().items() if m}
    expected = {3: [(3, 2)], 4: [(5, 4)], 5: [(2, 0), (7, 6)], 6: [(4, 1)]}
    r = label_image(WORKED)
    recs = {c.root: c for c in components(r)}
    filled = label_image(WORKED, LabelingConfig(fill_holes=True))
    checks = {
        "events": merges == expected,
        "tree": adjacency_tree(r).edges() == [(1, 0), (6, 1)],
        "euler": euler_number(r) == 0,
        "fg_s": recs[1].features.s == 56,
        "hole_s": recs[6].features.s == 11,
        "filled_s": filled.features[1].s == 67,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    record("C6", ok, "worked example: events, tree 6->1->0, euler 0, s 56/11/67",
           "all checks" if ok else "failed: " + ",".join(failed))
    assert merges == expected
    assert ok, failed


def test_c7_benchmark_trends():
    spec = bench.BenchSpec(
        width=2048, height=2048, densities=[0.0, 0.5], granularities=[1, 4, 16],
        seeds=3, warmup=1, iterations=3, steps=False,
    )
    t0 = time.perf_counter()
    report = bench.run(spec)
    elapsed = time.perf_counter() - t0

    base = {g: report.get(0.5, g, "base", "total").ns_px.med for g in (1, 4, 16)}
    trend_a = base[16] < base[4] < base[1]
    ratios_b = {}
    for g in spec.granularities:
        ref = report.get(0.0, g, "base", "total").ns_px.med
        for extra in ("euler", "fill"):
            ratios_b[(extra, g)] = report.get(0.0, g, extra, "delta").ns_px.med / ref
    trend_b = all(v < 0.05 for v in ratios_b.values())
    rel = report.get(0.5, 1, "relabel", "delta").ns_px.med
    eul = report.get(0.5, 1, "euler", "delta").ns_px.med
    trend_c = rel > eul
    in_budget = elapsed < BENCH_BUDGET_S

    record("C7a", trend_a, "base ns/px at d=0.5: g16 < g4 < g1",
           f"{base[16]:.2f} < {base[4]:.2f} < {base[1]:.2f}")
    worst = max(ratios_b, key=ratios_b.get)
    record("C7b", trend_b, "euler/fill extras at d=0 below 5% of base",
           f"worst {worst[0]} g={worst[1]}: {100 * ratios_b[worst]:.2f}%")
    record("C7c", trend_c, "relabel delta > euler delta at g=1, d=0.5",
           f"{rel:.2f} > {eul:.2f} ns/px")
    record("C7t", in_budget, "benchmark run time", f"{elapsed:.0f}s < {BENCH_BUDGET_S:.0f}s")
    assert trend_a, base
    assert trend_b, ratios_b
    assert trend_c, (rel, eul)
    assert in_budget, elapsed


def run_twice(tmp_path, make_args, name):
    outs = []
    for k in range(2):
        path = tmp_path / f"{k}-{name}"
        assert main(make_args(str(path))) == 0
        outs.append(path.read_bytes())
    return outs


def strip_timing(csv_bytes):
    keep = len(["d", "g", "config", "step"])
    return [",".join(line.split(",")[:keep]) for line in csv_bytes.decode().splitlines()]


def test_c8_cli_determinism(tmp_path, capsys):
    img = tmp_path / "in.pbm"
    assert main(["gen", "--size", "96", "--density", "0.45", "--granularity", "2",
                 "--seed", "7", "-o", str(img)]) == 0
    results = {}
    results["gen pbm"] = run_twice(
        tmp_path, lambda p: ["gen", "--size", "96", "--density", "0.45", "--granularity", "2",
                             "--seed", "7", "-o", p], "g.pbm")
    results["label pgm"] = run_twice(
        tmp_path, lambda p: ["label", str(img), "--relabel", "-o", p,
                             "--features-csv", p + ".csv"], "l.pgm")
    results["label csv"] = run_twice(
        tmp_path, lambda p: ["label", str(img), "--relabel", "--densify", "-o", p,
                             "--features-csv", p + ".f.csv"], "l.csv")
    feats = [(tmp_path / f"{k}-l.pgm.csv").read_bytes() for k in range(2)]
    results["features csv"] = feats
    bench_out = run_twice(
        tmp_path, lambda p: ["bench", "--size", "64", "--densities", "0,0.5", "--granularities",
                             "1,4", "--seeds", "2", "--iterations", "1", "--warmup", "0",
                             "-q", "-o", p], "b.csv")
    results["bench csv (no timings)"] = [strip_timing(b) for b in bench_out]
    differing = [k for k, (a, b) in results.items() if a != b]
    ok = not differing
    record("C8", ok, "repeated CLI runs are byte-identical",
           ", ".join(results) if ok else "differ: " + ", ".join(differing))
    assert ok, differing
