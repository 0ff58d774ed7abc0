"""Timing harness: share/reconstruct wall time over image size and (t, n)."""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import scheme
from .imagecodec import ImagePayload

DEFAULT_SIZES_MB = (1, 2, 4, 8)
DEFAULT_GRID = ((2, 3), (3, 5), (5, 5), (6, 10))
MB = 1 << 20
_WIDTH = 1024


def synthetic_image(nbytes: int, rng: random.Random) -> ImagePayload:
    """Random RGB image 1024 pixels wide with roughly ``nbytes`` of pixel data."""
    height = max(4, round(nbytes / (3 * _WIDTH) / 4) * 4)
    pixels = np.frombuffer(rng.randbytes(3 * _WIDTH * height), dtype=np.uint8)
    return ImagePayload(_WIDTH, height, pixels.reshape(height, _WIDTH, 3).copy())


def best_time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


@dataclass(frozen=True)
class BenchRow:
    size_mb: float
    nbytes: int
    t: int
    n: int
    share_s: float
    reconstruct_s: float


@dataclass(frozen=True)
class LinearFit:
    t: int
    n: int
    slope_s_per_mb: float
    intercept_s: float
    r_squared: float


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    fits: list[LinearFit] = field(default_factory=list)

    COLUMNS = ("size_mb", "nbytes", "t", "n", "share_s", "reconstruct_s")
    FIT_COLUMNS = ("t", "n", "slope_s_per_mb", "intercept_s", "r_squared")

    def to_tsv(self) -> str:
        lines = ["\t".join(self.COLUMNS)]
        for r in self.rows:
            d = asdict(r)
            lines.append("\t".join(_fmt(d[c]) for c in self.COLUMNS))
        lines.append("")
        lines.append("\t".join(("fit",) + self.FIT_COLUMNS))
        for f in self.fits:
            d = asdict(f)
            lines.append("\t".join(["fit"] + [_fmt(d[c]) for c in self.FIT_COLUMNS]))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = [f"{'size MB':>8} {'(t,n)':>8} {'share s':>10} {'reconstruct s':>14}"]
        for r in self.rows:
            out.append(f"{r.size_mb:8.2f} {f'({r.t},{r.n})':>8} {r.share_s:10.4f} {r.reconstruct_s:14.4f}")
        out.append("")
        out.append("share time vs size, least squares:")
        for f in self.fits:
            out.append(
                f"  ({f.t},{f.n}): {f.slope_s_per_mb:.4f} s/MB {f.intercept_s:+.4f} s, R^2 = {f.r_squared:.4f}"
            )
        return "\n".join(out) + "\n"


def _fmt(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def linear_fit(xs, ys) -> tuple[float, float, float]:
    res = stats.linregress(xs, ys)
    return float(res.slope), float(res.intercept), float(res.rvalue**2)


def run_bench(
    sizes_mb=DEFAULT_SIZES_MB,
    grid=DEFAULT_GRID,
    repeats: int = 3,
    seed: int = 0,
    jobs: int = 1,
) -> BenchReport:
    rng = random.Random(seed)
    report = BenchReport()
    images = {mb: synthetic_image(int(mb * MB), rng) for mb in sizes_mb}
    for t, n in grid:
        params = scheme.SchemeParams(t, n)
        for mb, image in images.items():
            bundles = scheme.generate_shares(image, params, rng, jobs=jobs)
            share_s = best_time(lambda: scheme.generate_shares(image, params, rng, jobs=jobs), repeats)
            rec_s = best_time(lambda: scheme.reconstruct(bundles[:t]), repeats)
            report.rows.append(BenchRow(image.nbits / 8 / MB, image.nbits // 8, t, n, share_s, rec_s))
        rows = [r for r in report.rows if (r.t, r.n) == (t, n)]
        if len(rows) >= 2:
            slope, icpt, r2 = linear_fit([r.size_mb for r in rows], [r.share_s for r in rows])
            report.fits.append(LinearFit(t, n, slope, icpt, r2))
    return report
