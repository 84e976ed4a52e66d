import json

import numpy as np
import pytest

from runlab.cli import main
from runlab.formats import read_pbm, read_pgm16, write_pbm
from runlab.model import BinaryImage

from conftest import WORKED


@pytest.fixture
def worked_pbm(tmp_path):
    path = tmp_path / "worked.pbm"
    path.write_bytes(write_pbm(BinaryImage(WORKED)))
    return path


def test_euler(worked_pbm, capsys):
    assert main(["euler", str(worked_pbm)]) == 0
    assert capsys.readouterr().out.strip() == "0"
    assert main(["euler", "--connectivity", "fg4bg8", str(worked_pbm)]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_label_outputs(worked_pbm, tmp_path, capsys):
    out = tmp_path / "labels.pgm"
    feats = tmp_path / "f.csv"
    assert main(["label", str(worked_pbm), "--relabel", "-o", str(out), "--features-csv", str(feats)]) == 0
    labels = read_pgm16(out.read_bytes())
    assert sorted(np.unique(labels).tolist()) == [0, 1, 6]
    assert feats.read_text().splitlines()[2] == "1,FG,0,56,386,168,0,6,1,13"


def test_label_csv_by_suffix_and_densify(worked_pbm, tmp_path, capsys):
    out = tmp_path / "labels.csv"
    assert main(["label", str(worked_pbm), "--relabel", "--densify", "-o", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[3] == "0,1,0,1,2,1,0,0,0,1,2,1,0,1,0"
    assert capsys.readouterr().out.startswith("root,parity,parent")


def test_label_of_empty_image(tmp_path, capsys):
    path = tmp_path / "empty.pbm"
    path.write_bytes(b"P1\n3 2\n000000\n")
    assert main(["label", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1:] == ["0,BG,,6,6,3,0,1,0,2"]


def test_tree_dot(worked_pbm, capsys):
    assert main(["tree", str(worked_pbm), "--format", "dot"]) == 0
    out = capsys.readouterr().out
    assert "1 -> 0;" in out and "6 -> 1;" in out
    assert main(["tree", str(worked_pbm)]) == 0
    assert json.loads(capsys.readouterr().out)["label"] == 0


def test_fill(worked_pbm, tmp_path):
    out = tmp_path / "filled.pbm"
    assert main(["fill", str(worked_pbm), "-o", str(out)]) == 0
    data = out.read_bytes()
    assert data.startswith(b"P4")
    assert read_pbm(data).pixels.sum() == 67
    assert main(["fill", str(worked_pbm), "--plain", "-o", str(out)]) == 0
    assert out.read_bytes().startswith(b"P1")


def test_gen_then_euler(tmp_path, capsys):
    path = tmp_path / "full.pbm"
    assert main(["gen", "--size", "16", "--density", "1", "-o", str(path)]) == 0
    assert main(["euler", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["gen", "--width", "5", "--height", "3", "--density", "0.5", "-o", str(path)]) == 0
    assert read_pbm(path.read_bytes()).pixels.shape == (3, 5)


def test_bench_small(tmp_path):
    out = tmp_path / "b.csv"
    args = ["bench", "--size", "32", "--densities", "0.5", "--granularities", "1",
            "--seeds", "1", "--iterations", "1", "--warmup", "0", "-q", "-o", str(out)]
    assert main(args) == 0
    assert out.read_text().startswith("d,g,config,step")


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["label", "x.pbm", "--densify"],
        ["label", "x.pbm", "-o", "l.pgm"],
        ["gen", "--density", "0.5"],
        ["gen", "--size", "4", "--density", "2"],
        ["gen", "--size", "4", "--density", "0.5", "--granularity", "8"],
        ["bench", "--cpp"],
        ["bench", "--granularities", "a,b"],
        ["euler", "--connectivity", "fg6", "x.pbm"],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 1


def test_io_errors(tmp_path, capsys):
    assert main(["euler", str(tmp_path / "missing.pbm")]) == 2
    bad = tmp_path / "bad.pbm"
    bad.write_bytes(b"P2\n1 1\n1\n0\n")
    assert main(["euler", str(bad)]) == 2
    assert "P2" in capsys.readouterr().err


def test_label_overflowing_pgm16_is_a_format_error(tmp_path):
    # a 400x400 checkerboard has 80000 isolated foreground pixels under fg4bg8
    px = (np.indices((400, 400)).sum(axis=0) % 2).astype(np.uint8)
    path = tmp_path / "cb.pbm"
    path.write_bytes(write_pbm(BinaryImage(px)))
    args = ["label", str(path), "--connectivity", "fg4bg8", "--relabel", "-o",
            str(tmp_path / "l.pgm"), "--features-csv", str(tmp_path / "f.csv")]
    assert main(args) == 2
