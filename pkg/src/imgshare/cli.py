"""Command line front end.

Exit status: 0 on success, 2 on usage errors, 1 on any runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import random
import secrets
import sys
from pathlib import Path

from . import bench, imagecodec, scheme
from .cipher import CipherMode, IvDerivation

log = logging.getLogger("imgshare")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


def share_paths(outdir: Path, stem: str, n: int, fmt: str) -> list[Path]:
    return [outdir / f"{stem}.share{i}.{fmt}" for i in range(1, n + 1)]


def cmd_share(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed) if args.seed is not None else secrets.SystemRandom()
    params = scheme.SchemeParams(
        args.t, args.n, args.mode, args.iv_derivation, args.key_position
    )
    image = imagecodec.read_image(args.input)
    log.info("read %s: %dx%d", args.input, image.width, image.height)
    bundles = scheme.generate_shares(image, params, rng, jobs=args.jobs)

    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for bundle, path in zip(bundles, share_paths(outdir, Path(args.input).stem, params.n, args.format)):
            written.extend(scheme.save_bundle(bundle, path, args.format))
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    for p in written[::2]:
        print(p)
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    bundles = [scheme.load_bundle(p) for p in args.shares]
    image = scheme.reconstruct(bundles)
    out = Path(args.output)
    fmt = args.format or out.suffix.lstrip(".") or "png"
    imagecodec.save_image(image, out, fmt)
    print(f"{out}: {image.width}x{image.height}, checksum verified ({bundles[0].metadata.checksum})")
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    for p in args.shares:
        path = Path(p)
        meta = scheme.load_metadata(path if path.suffix == scheme.META_SUFFIX else scheme.sidecar_path(path))
        print(f"{p}:")
        print(scheme.inspect(scheme.ShareBundle(None, None, meta)))
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    report = bench.run_bench(args.sizes, args.grid, args.repeats, args.seed or 0, args.jobs)
    sys.stdout.write(report.to_tsv() if args.format == "tsv" else report.to_text())
    return EXIT_OK


def _pair(text: str) -> tuple[int, int]:
    try:
        t, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected t,n but got {text!r}") from None
    return t, n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="imgshare", description="(t,n)-threshold secret sharing of images")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("share", help="split an image into n share images")
    sp.add_argument("input", help="PNG or P6 PPM image")
    sp.add_argument("-t", type=int, required=True, help="threshold")
    sp.add_argument("-n", type=int, required=True, help="number of participants")
    sp.add_argument("-o", "--output", default=".", help="output directory")
    sp.add_argument("--mode", choices=[m.value for m in CipherMode], default="cbc")
    sp.add_argument("--iv-derivation", choices=[d.value for d in IvDerivation], default="sha")
    sp.add_argument("--key-position", type=int, default=0, help="bit offset of the key (multiple of 8)")
    sp.add_argument("--format", choices=["png", "ppm"], default="png")
    sp.add_argument("--seed", type=int, help="deterministic entropy; for tests only, never for real secrets")
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_share)

    rp = sub.add_parser("reconstruct", help="rebuild the image from t or more shares")
    rp.add_argument("shares", nargs="+", help="share images (sidecars are found next to them)")
    rp.add_argument("-o", "--output", required=True)
    rp.add_argument("--format", choices=["png", "ppm"])
    rp.set_defaults(func=cmd_reconstruct)

    ip = sub.add_parser("inspect", help="print share metadata")
    ip.add_argument("shares", nargs="+", help="share images or .meta files")
    ip.set_defaults(func=cmd_inspect)

    bp = sub.add_parser("bench", help="time sharing and reconstruction on synthetic images")
    bp.add_argument("--sizes", type=float, nargs="+", default=list(bench.DEFAULT_SIZES_MB), metavar="MB")
    bp.add_argument("--grid", type=_pair, nargs="+", default=list(bench.DEFAULT_GRID), metavar="T,N")
    bp.add_argument("--repeats", type=int, default=3)
    bp.add_argument("--format", choices=["table", "tsv"], default="table")
    bp.add_argument("--seed", type=int)
    bp.add_argument("--jobs", type=int, default=1)
    bp.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s: %(message)s")

    if args.command == "share":
        if not 1 <= args.t <= args.n:
            parser.error(f"need 1 <= t <= n, got t={args.t}, n={args.n}")
        if args.key_position < 0 or args.key_position % 8:
            parser.error("--key-position must be a non-negative multiple of 8")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")

    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"imgshare: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
