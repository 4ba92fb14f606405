"""Command line entry point: ``projwarp warp | bench | pyramid | make-corpus``.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric/degeneracy error.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import BenchConfig, emit_report, parse_methods, parse_seeds, run_benchmark
from .corpus import document_corpus, write_corpus
from .engine import WarpRequest, warp
from .errors import DataError, NumericError
from .geometry import read_matrix
from .imageio import load_image, save_image
from .kernels import build_lut, parse_kernel
from .pyramids import build_mipmap, build_ripmap, dump_levels
from .samplers import parse_sampler

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _size(text):
    try:
        w, h = text.lower().split("x")
        w, h = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("output size must be positive")
    return w, h


def _tokens(fn, text, what):
    try:
        return fn(text)
    except ValueError as exc:
        raise UsageError(f"bad {what}: {exc}") from None


def cmd_warp(args):
    kernel = _tokens(parse_kernel, args.kernel, "--kernel")
    if args.lut:
        kernel = build_lut(kernel, args.lut)
    cfg = _tokens(lambda t: parse_sampler(t, kernel), args.sampler, "--sampler")
    src = load_image(args.inp)
    h = read_matrix(args.matrix)
    out_w, out_h = args.out_size or (src.shape[1], src.shape[0])
    img, stats = warp(WarpRequest(src, h, out_w, out_h, cfg), workers=args.workers)
    save_image(img, args.out)
    print(json.dumps({"pixels": stats.pixels_processed,
                      "taps_per_pixel": stats.taps_per_pixel,
                      "samples_per_pixel": stats.samples_per_pixel}))


def cmd_bench(args):
    methods = _tokens(parse_methods, args.methods, "--methods")
    seeds = _tokens(parse_seeds, args.seeds, "--seeds")
    cfg = BenchConfig(seeds=seeds, methods=methods, corpus_dir=Path(args.corpus),
                      size=args.size or None, repetitions=args.reps,
                      output_format=args.format, workers=args.workers)
    _tokens(lambda _: cfg.validate(), None, "benchmark config")

    def progress(row):
        if args.verbose:
            print(f"{row.sampler:>8} {row.kernel:>8} {row.time_s:9.4f}s {row.psnr_db:7.2f} dB",
                  file=sys.stderr)

    text = emit_report(run_benchmark(cfg, progress), args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_pyramid(args):
    src = load_image(args.inp)
    structure = build_mipmap(src) if args.type == "mip" else build_ripmap(src)
    paths = []
    if args.dump:
        paths = dump_levels(structure, args.dump, save_image)
    print(json.dumps({"type": args.type, "extra_memory_ratio": structure.extra_memory_ratio(),
                      "files": len(paths)}))


def cmd_make_corpus(args):
    paths = write_corpus(document_corpus(args.count, args.size, args.seed), args.out)
    print(f"wrote {len(paths)} images to {args.out}")


def build_parser():
    p = _Parser(prog="projwarp", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    w = sub.add_parser("warp", help="warp one image by a homography")
    w.add_argument("--in", dest="inp", required=True)
    w.add_argument("--matrix", required=True, help="file with 9 reals, row-major")
    w.add_argument("--sampler", default="point", help="point | super:<n> | mip | rip | fast:<n>[:seed]")
    w.add_argument("--kernel", default="bilinear",
                   help="nearest | bilinear | bicubic[:alpha] | bspline | hermite")
    w.add_argument("--lut", type=int, default=0, metavar="BINS",
                   help="use a piecewise-constant kernel table with BINS bins per unit")
    w.add_argument("--out", required=True)
    w.add_argument("--out-size", type=_size, default=None, metavar="WxH")
    w.add_argument("--workers", type=int, default=1)
    w.set_defaults(func=cmd_warp)

    b = sub.add_parser("bench", help="composed-warp quality/time benchmark")
    b.add_argument("--corpus", required=True, help="directory of .pgm/.png images")
    b.add_argument("--seeds", default="10", help="count (0..n-1) or comma list")
    b.add_argument("--methods", default="all", help="all or sampler+kernel,...")
    b.add_argument("--reps", type=int, default=3)
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.add_argument("--out", default=None)
    b.add_argument("--size", type=int, default=128, help="centre-crop size; 0 keeps full images")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("-v", "--verbose", action="store_true")
    b.set_defaults(func=cmd_bench)

    y = sub.add_parser("pyramid", help="build a mip-map or rip-map")
    y.add_argument("--in", dest="inp", required=True)
    y.add_argument("--type", choices=("mip", "rip"), default="mip")
    y.add_argument("--dump", default=None, help="directory for numbered level images")
    y.set_defaults(func=cmd_pyramid)

    c = sub.add_parser("make-corpus", help="write synthetic document-like test images")
    c.add_argument("--out", required=True)
    c.add_argument("--count", type=int, default=5)
    c.add_argument("--size", type=int, default=128)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_make_corpus)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"projwarp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"projwarp: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"projwarp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
