"""Command-line front end: filter, bench and compare drivers over PGM files
or the built-in synthetic image generators."""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .counters import CSV_HEADER, counters_report
from .engine import MODES, filter_image
from .image import GrayImage, gen_image, read_pgm, write_pgm
from .oracles import huang_filter, oracle_median_filter
from .topology import FrequencyProfile


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="input PGM (binary P5, 8- or 16-bit)")
    p.add_argument("--gen", choices=["normal_noise", "sine_diag", "constant", "two_mode"],
                   help="generate the input instead of reading a file")
    p.add_argument("--width", type=int, default=512, help="generated image width")
    p.add_argument("--height", type=int, default=512, help="generated image height")
    p.add_argument("--depth", type=int, default=8, choices=[8, 16],
                   help="generated image bit depth")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--period", type=float, default=100.0, help="sine_diag period")
    p.add_argument("--value", type=int, default=None, help="constant image value")


def _add_filter_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--window", "-n", type=int, required=True, help="odd window side")
    p.add_argument("--rank", type=int, default=None, help="1-based order statistic")
    p.add_argument("--percentile", type=float, default=None,
                   help="order statistic as a fraction in (0, 1]")
    p.add_argument("--max-error", type=int, default=1,
                   help="allowed output error in gray values")
    p.add_argument("--mode", choices=list(MODES), default="uniform")
    p.add_argument("--profile", default="auto",
                   help="'auto' or a text file of per-value weights (adaptive mode)")
    p.add_argument("--bands", type=int, default=1,
                   help="filter this many horizontal bands independently")
    p.add_argument("--counters", help="write the operation-count CSV here")


def _load_input(args) -> GrayImage:
    if (args.input is None) == (args.gen is None):
        raise ValueError("give exactly one of --input or --gen")
    if args.input is not None:
        return read_pgm(args.input)
    params = {}
    if args.gen == "sine_diag":
        params["period"] = args.period
    if args.gen == "constant" and args.value is not None:
        params["value"] = args.value
    return gen_image(args.gen, args.width, args.height, args.depth, args.seed, **params)


def _load_profile(args) -> FrequencyProfile | None:
    if args.profile == "auto":
        return None
    weights = np.loadtxt(args.profile, dtype=np.float64)
    return FrequencyProfile(np.atleast_1d(weights), "file")


def _run_label(args, n: int) -> str:
    extra = f"-err{args.max_error}" if args.max_error > 1 else ""
    return f"tree-{args.mode}{extra}-n{n}"


def cmd_filter(args) -> int:
    image = _load_input(args)
    out, counters = filter_image(
        image, args.window, rank=args.rank, percentile=args.percentile,
        max_error=args.max_error, mode=args.mode, profile=_load_profile(args),
        bands=args.bands,
    )
    if args.output:
        write_pgm(out, args.output)
    rows = [(_run_label(args, args.window), counters)]
    if args.counters:
        with open(args.counters, "w") as fh:
            fh.write(counters_report(rows, "csv") + "\n")
    print(counters_report(rows, "human"))
    return 0


def cmd_bench(args) -> int:
    image = _load_input(args)
    windows = [int(tok) for tok in args.windows.split(",") if tok]
    rows = []
    for n in windows:
        start = time.perf_counter()
        _, counters = filter_image(
            image, n, rank=args.rank, percentile=args.percentile,
            max_error=args.max_error, mode=args.mode, profile=_load_profile(args),
            bands=args.bands,
        )
        elapsed = time.perf_counter() - start
        rows.append((_run_label(args, n), counters))
        print(f"{_run_label(args, n)}: {elapsed:.3f}s "
              f"({counters.total_add / max(1, counters.pixels):.1f} add/px, "
              f"{counters.total_cmp / max(1, counters.pixels):.1f} cmp/px)",
              file=sys.stderr)
    csv = counters_report(rows, "csv")
    if args.oracle == "huang":
        lines = [csv]
        for n in windows:
            _, adds = huang_filter(image, n, args.rank)
            pixels = image.width * image.height
            lines.append(f"huang-n{n},0,0,{adds},0,0,0,{adds},0,0.000000,{pixels}")
        csv = "\n".join(lines)
    if args.counters:
        with open(args.counters, "w") as fh:
            fh.write(csv + "\n")
    else:
        print(csv)
    return 0


def cmd_compare(args) -> int:
    image = _load_input(args)
    out, _ = filter_image(
        image, args.window, rank=args.rank, percentile=args.percentile,
        max_error=args.max_error, mode=args.mode, profile=_load_profile(args),
        bands=args.bands,
    )
    kind = {"sort": "full_sort", "huang": "huang_histogram"}[args.oracle]
    reference = oracle_median_filter(image, args.window, args.rank, kind)
    diff = np.abs(out.pixels.astype(np.int64) - reference.pixels.astype(np.int64))
    max_diff = int(diff.max())
    limit = 0 if args.max_error == 1 else args.max_error
    print(f"max abs difference vs {args.oracle} oracle: {max_diff} (limit {limit})")
    return 0 if max_diff <= limit else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medtree",
        description="2D running median / order-statistic filter over "
                    "hierarchical interval-count trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="filter one image")
    _add_input_args(p)
    _add_filter_args(p)
    p.add_argument("--output", "-o", help="output PGM path")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("bench", help="sweep window sizes, emit counters CSV")
    _add_input_args(p)
    _add_filter_args(p)
    p.add_argument("--windows", default="11,21,31,41,51",
                   help="comma-separated window sides to sweep")
    p.add_argument("--oracle", choices=["none", "huang"], default="none",
                   help="also emit baseline rows")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="check the filter against an oracle")
    _add_input_args(p)
    _add_filter_args(p)
    p.add_argument("--oracle", choices=["sort", "huang"], default="sort")
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"medtree: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
