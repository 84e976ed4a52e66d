"""Command-line interface: ``runlab {label,tree,euler,fill,gen,bench}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench as bench_mod
from .analysis import adjacency_tree, components, euler_number, to_binary
from .formats import (
    FormatError,
    read_pbm,
    write_features_csv,
    write_label_image,
    write_pbm,
    write_tree,
)
from .imagegen import GeneratorSpec, generate
from .lsl import label_image
from .model import BinaryImage, LabelingConfig

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_image(path: str) -> BinaryImage:
    data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    return read_pbm(data)


def _write(path: Optional[str], data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _add_connectivity(p):
    p.add_argument("--connectivity", choices=["fg8bg4", "fg4bg8"], default="fg8bg4",
                   help="foreground/background adjacency (default fg8bg4)")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_range(text: str) -> list[float]:
    try:
        return bench_mod.parse_range(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="runlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("label", help="label a PBM image")
    p.add_argument("input")
    _add_connectivity(p)
    p.add_argument("--features", action="store_true",
                   help="compute features (implied whenever a feature table is written)")
    p.add_argument("--relabel", action="store_true", help="produce a label image")
    p.add_argument("--densify", action="store_true", help="renumber labels 0..n-1")
    p.add_argument("--fill-holes", action="store_true")
    p.add_argument("-o", "--output", help="label image path (.pgm or .csv)")
    p.add_argument("--format", choices=["pgm16", "csv"],
                   help="label image format (default from the output suffix)")
    p.add_argument("--features-csv", help="feature table path (default: stdout)")

    p = sub.add_parser("tree", help="export the adjacency tree")
    p.add_argument("input")
    _add_connectivity(p)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("-o", "--output")

    p = sub.add_parser("euler", help="print the Euler number")
    p.add_argument("input")
    _add_connectivity(p)

    p = sub.add_parser("fill", help="fill holes and write a PBM")
    p.add_argument("input")
    _add_connectivity(p)
    p.add_argument("-o", "--output")
    p.add_argument("--plain", action="store_true", help="write P1 instead of P4")

    p = sub.add_parser("gen", help="generate a random test image")
    p.add_argument("--size", type=int, help="square image side")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--granularity", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.add_argument("--plain", action="store_true", help="write P1 instead of P4")

    p = sub.add_parser("bench", help="time the pipeline over a density/granularity sweep")
    p.add_argument("--size", type=int, default=2048)
    p.add_argument("--densities", type=_float_range, default=_float_range("0:1:0.05"))
    p.add_argument("--granularities", type=_int_list, default=[1, 2, 4, 8, 16])
    p.add_argument("--seeds", type=int, default=5, help="images per cell")
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--warmup", type=int, default=1)
    p.add_argument("--iterations", type=int, default=3)
    p.add_argument("--clock-ghz", type=float)
    p.add_argument("--cpp", action="store_true", help="require cycles-per-pixel columns")
    p.add_argument("--no-steps", action="store_true", help="skip per-step timing")
    p.add_argument("-o", "--output")
    p.add_argument("-q", "--quiet", action="store_true")
    return parser


def _cmd_label(args) -> int:
    if args.densify and not args.relabel:
        raise UsageError("--densify requires --relabel")
    if args.output and not args.relabel:
        raise UsageError("-o/--output requires --relabel")
    image = _read_image(args.input)
    config = LabelingConfig(
        connectivity=args.connectivity,
        fill_holes=args.fill_holes,
        compute_features=True,
        relabel=args.relabel,
        densify_labels=args.densify,
    )
    result = label_image(image, config)
    if args.output:
        fmt = args.format or ("csv" if args.output.endswith(".csv") else "pgm16")
        try:
            data = write_label_image(result.label_image, fmt)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        _write(args.output, data)
    _write(args.features_csv, write_features_csv(components(result)))
    return EXIT_OK


def _cmd_tree(args) -> int:
    result = label_image(_read_image(args.input), LabelingConfig(connectivity=args.connectivity))
    _write(args.output, write_tree(adjacency_tree(result), args.format))
    return EXIT_OK


def _cmd_euler(args) -> int:
    config = LabelingConfig(connectivity=args.connectivity, compute_features=False)
    result = label_image(_read_image(args.input), config)
    print(euler_number(result))
    return EXIT_OK


def _cmd_fill(args) -> int:
    config = LabelingConfig(
        connectivity=args.connectivity, fill_holes=True, compute_features=False,
        relabel=True, compute_euler=False,
    )
    result = label_image(_read_image(args.input), config)
    _write(args.output, write_pbm(BinaryImage(to_binary(result)), plain=args.plain))
    return EXIT_OK


def _cmd_gen(args) -> int:
    width = args.width or args.size
    height = args.height or args.size
    if not width or not height:
        raise UsageError("give --size or both --width and --height")
    try:
        spec = GeneratorSpec(width, height, args.density, args.granularity, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(args.output, write_pbm(generate(spec), plain=args.plain))
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        spec = bench_mod.BenchSpec(
            width=args.size, height=args.size, densities=args.densities,
            granularities=args.granularities, seeds=args.seeds, seed_base=args.seed_base,
            warmup=args.warmup, iterations=args.iterations, clock_ghz=args.clock_ghz,
            require_cpp=args.cpp, steps=not args.no_steps,
        )
        for g in spec.granularities:
            GeneratorSpec(spec.width, spec.height, 0.0, g)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    report = bench_mod.run(spec, progress)
    _write(args.output, bench_mod.export_csv(report))
    return EXIT_OK


COMMANDS = {
    "label": _cmd_label,
    "tree": _cmd_tree,
    "euler": _cmd_euler,
    "fill": _cmd_fill,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, FormatError) as exc:
        print(f"runlab: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
