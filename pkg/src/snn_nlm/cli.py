"""Command-line interface: denoise, add-noise, toy, bench.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
Sigma flags are given on the 0-255 scale and divided by 255 internally;
pixel data is clipped to [0, 1] only when written back to disk.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from .core import NlmParams
from .filtering import denoise_image
from .metrics import QualityReport, psnr, ssim
from .noise import NoiseSpec, add_white_noise, colored_noise_pipeline
from .toymodel import (
    ToyScenario,
    mc_oracle,
    nn_moments,
    prediction_error,
    snn_moments,
)

__all__ = ["main", "load_image", "save_image"]

_FORMATS = {".png", ".pgm", ".ppm"}


def load_image(path: str | Path) -> np.ndarray:
    """Read an 8-bit PNG/PGM/PPM file as float64 in [0, 1]."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    if path.suffix.lower() not in _FORMATS:
        raise ValueError(f"unsupported image format {path.suffix!r} (want PNG/PGM/PPM)")
    with PILImage.open(path) as handle:
        if handle.mode not in ("L", "RGB"):
            raise ValueError(
                f"unsupported image mode {handle.mode!r}; only 8-bit grayscale/RGB"
            )
        data = np.asarray(handle, dtype=np.float64)
    return data / 255.0


def save_image(path: str | Path, img: np.ndarray) -> None:
    """Clip to [0, 1], quantize to 8 bits and write PNG/PGM/PPM."""
    path = Path(path)
    if path.suffix.lower() not in _FORMATS:
        raise ValueError(f"unsupported image format {path.suffix!r} (want PNG/PGM/PPM)")
    data = np.clip(img, 0.0, 1.0)
    data = np.rint(data * 255.0).astype(np.uint8)
    PILImage.fromarray(data).save(path)


def _thread_count(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("SNN_NLM_THREADS")
    return int(env) if env else 1


def _build_params(args, sigma_unit: float) -> NlmParams:
    h_unit = (args.h / 255.0) if args.h is not None else 0.75 * sigma_unit
    return NlmParams(
        sigma=sigma_unit,
        h=h_unit,
        n_neighbors=args.neighbors,
        offset=args.offset,
        patch_side=args.patch,
        search_side=args.search,
    )


def cmd_denoise(args) -> int:
    img = load_image(args.input)
    sigma_unit = args.sigma / 255.0
    params = _build_params(args, sigma_unit)
    out = denoise_image(img, params, strategy="snn", threads=_thread_count(args.threads))
    save_image(args.output, out)
    if args.reference is not None:
        ref = load_image(args.reference)
        report = QualityReport(psnr=psnr(out, ref), ssim=ssim(out, ref))
        print(f"psnr={report.psnr:.4f} ssim={report.ssim:.4f}")
    return 0


def cmd_add_noise(args) -> int:
    img = load_image(args.input)
    spec = NoiseSpec(sigma=args.sigma, seed=args.seed, domain=args.domain)
    if args.domain == "white":
        noisy = add_white_noise(img, spec)
    else:
        noisy, rgb_sigma = colored_noise_pipeline(
            img, spec, pattern=args.pattern, clip_cfa=args.clip_cfa
        )
        sidecar = Path(str(args.output) + ".sigma.txt")
        sidecar.write_text(
            f"sigma_r={rgb_sigma.r:.6f}\n"
            f"sigma_g={rgb_sigma.g:.6f}\n"
            f"sigma_b={rgb_sigma.b:.6f}\n"
            f"sigma_mean={rgb_sigma.mean:.6f}\n"
        )
    save_image(args.output, noisy)
    return 0


def _print_toy(strategy: str, err, source: str) -> None:
    print(
        f"strategy={strategy} source={source} "
        f"bias_sq={err.bias_sq:.6f} variance={err.variance:.6f} mse={err.mse:.6f}"
    )


def cmd_toy(args) -> int:
    scn = ToyScenario(
        mu=args.mu,
        sigma=args.sigma,
        n_total=args.n_total,
        n_neighbors=args.neighbors,
        offset=args.offset,
    )
    for strategy in ("nn", "snn"):
        _print_toy(strategy, prediction_error(scn, strategy), "analytic")
    if args.oracle:
        for strategy in ("nn", "snn"):
            _print_toy(strategy, mc_oracle(scn, strategy, args.oracle, args.seed), "oracle")
    if args.curve_csv:
        span = args.curve_span * scn.sigma
        grid = np.linspace(scn.mu - span, scn.mu + span, args.curve_points)
        m_nn = nn_moments(scn, grid)
        m_snn = snn_moments(scn, grid)
        with open(args.curve_csv, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["mu_r", "E_nn", "Std_nn", "E_snn", "Std_snn"])
            for i, mu_r in enumerate(grid):
                writer.writerow([
                    f"{mu_r:.6f}",
                    f"{m_nn.expectation[i]:.6f}",
                    f"{np.sqrt(m_nn.variance[i]):.6f}",
                    f"{m_snn.expectation[i]:.6f}",
                    f"{np.sqrt(m_snn.variance[i]):.6f}",
                ])
    return 0


def _parse_grid(text: str, cast):
    return [cast(tok) for tok in text.split(",") if tok.strip()]


def cmd_bench(args) -> int:
    image_dir = Path(args.images)
    if not image_dir.is_dir():
        raise FileNotFoundError(f"no such image directory: {image_dir}")
    files = sorted(p for p in image_dir.iterdir() if p.suffix.lower() in _FORMATS)
    if not files:
        raise FileNotFoundError(f"no PNG/PGM/PPM images in {image_dir}")
    sigmas = _parse_grid(args.sigmas, float)
    neighbor_counts = _parse_grid(args.neighbors, int)
    offsets = _parse_grid(args.offsets, float)
    threads = _thread_count(args.threads)

    rows = []
    for file_idx, path in enumerate(files):
        clean = load_image(path)
        for sigma255 in sigmas:
            seed = args.seed + 1000 * file_idx + int(sigma255)
            if args.domain == "white":
                spec = NoiseSpec(sigma=sigma255, seed=seed, domain="white")
                noisy = add_white_noise(clean, spec)
                sigma_unit = sigma255 / 255.0
            else:
                if clean.ndim != 3:
                    raise ValueError(f"{path.name}: bayer bench needs RGB images")
                spec = NoiseSpec(sigma=sigma255, seed=seed, domain="bayer")
                noisy, rgb_sigma = colored_noise_pipeline(clean, spec, pattern=args.pattern)
                sigma_unit = rgb_sigma.mean / 255.0
            for n_nb in neighbor_counts:
                for offset in offsets:
                    params = NlmParams(
                        sigma=sigma_unit,
                        h=(args.h / 255.0) if args.h is not None else 0.75 * sigma_unit,
                        n_neighbors=n_nb,
                        offset=offset,
                        patch_side=args.patch,
                        search_side=args.search,
                    )
                    start = time.perf_counter()
                    out = denoise_image(noisy, params, strategy="snn", threads=threads)
                    wall_ms = (time.perf_counter() - start) * 1000.0
                    rows.append({
                        "image": path.name,
                        "sigma": sigma255,
                        "strategy": "nn" if offset == 0.0 else "snn",
                        "n_neighbors": n_nb,
                        "offset": offset,
                        "psnr": psnr(out, clean),
                        "ssim": ssim(out, clean),
                        "wall_ms": wall_ms,
                    })

    fieldnames = ["image", "sigma", "strategy", "n_neighbors", "offset", "psnr", "ssim", "wall_ms"]
    with open(args.out, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({**row, "psnr": f"{row['psnr']:.4f}",
                             "ssim": f"{row['ssim']:.4f}", "wall_ms": f"{row['wall_ms']:.2f}"})
        # one aggregate row per (sigma, strategy, n_neighbors, offset) configuration
        configs = sorted({(r["sigma"], r["strategy"], r["n_neighbors"], r["offset"]) for r in rows})
        for sigma255, strategy, n_nb, offset in configs:
            group = [r for r in rows if (r["sigma"], r["strategy"], r["n_neighbors"], r["offset"])
                     == (sigma255, strategy, n_nb, offset)]
            writer.writerow({
                "image": "(mean)",
                "sigma": sigma255,
                "strategy": strategy,
                "n_neighbors": n_nb,
                "offset": offset,
                "psnr": f"{np.mean([r['psnr'] for r in group]):.4f}",
                "ssim": f"{np.mean([r['ssim'] for r in group]):.4f}",
                "wall_ms": f"{np.mean([r['wall_ms'] for r in group]):.2f}",
            })
    return 0


def _add_filter_flags(parser) -> None:
    parser.add_argument("--sigma", type=float, required=True, help="noise std, 0-255 scale")
    parser.add_argument("--h", type=float, default=None,
                        help="filtering bandwidth, 0-255 scale (default 0.75*sigma)")
    parser.add_argument("--patch", type=int, default=3, help="patch side (odd)")
    parser.add_argument("--search", type=int, default=21, help="search window side (odd)")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default $SNN_NLM_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snn-nlm",
        description="Patch-based denoising with distance-offset neighbor selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise an image file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    _add_filter_flags(p)
    p.add_argument("--neighbors", type=int, default=16)
    p.add_argument("--offset", type=float, default=0.0,
                   help="0 = plain nearest neighbors, 1 = full offset selection")
    p.add_argument("--reference", default=None, help="clean image for quality report")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("add-noise", help="synthesize white or Bayer-colored noise")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--sigma", type=float, required=True, help="noise std, 0-255 scale")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--domain", choices=("white", "bayer"), default="white")
    p.add_argument("--pattern", choices=("rggb", "grbg", "gbrg", "bggr"), default="rggb")
    p.add_argument("--clip-cfa", action="store_true",
                   help="clamp the noisy CFA to [0,1] before demosaicing")
    p.set_defaults(func=cmd_add_noise)

    p = sub.add_parser("toy", help="single-pixel estimator bias/variance analysis")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--n-total", type=int, default=100)
    p.add_argument("--neighbors", type=int, default=16)
    p.add_argument("--offset", type=float, default=1.0)
    p.add_argument("--oracle", type=int, default=0, help="Monte-Carlo trials (0 = off)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--curve-csv", default=None, help="dump per-mu_r moment curves")
    p.add_argument("--curve-points", type=int, default=201)
    p.add_argument("--curve-span", type=float, default=4.0,
                   help="curve half-range in sigmas around mu")
    p.set_defaults(func=cmd_toy)

    p = sub.add_parser("bench", help="sweep configurations over an image directory")
    p.add_argument("--images", required=True, help="directory of PNG/PGM/PPM files")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--sigmas", default="5,10,20,30,40")
    p.add_argument("--neighbors", default="4,8,16,32")
    p.add_argument("--offsets", default="0,0.8")
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--patch", type=int, default=3)
    p.add_argument("--search", type=int, default=21)
    p.add_argument("--domain", choices=("white", "bayer"), default="white")
    p.add_argument("--pattern", choices=("rggb", "grbg", "gbrg", "bggr"), default="rggb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
