"""Noise synthesis: white Gaussian and the Bayer-domain colored pipeline.

The colored path mosaics a clean RGB image to a single-channel CFA
raster, injects white Gaussian noise there, and reconstructs RGB with the
gradient-corrected 5x5 linear demosaicer.  Because each output sample is
a linear combination of CFA samples, the injected noise becomes spatially
correlated ("colored") and its per-channel standard deviation can be
propagated exactly from the stencil coefficients.

``NoiseSpec.sigma`` is expressed on the 0-255 scale (the CLI convention);
it is divided by 255 before touching [0, 1] image data.  Noisy samples
are never clipped here; clipping happens only on file export.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import ndimage

from .core import validate_image

__all__ = [
    "NoiseSpec",
    "RgbSigma",
    "BAYER_PATTERNS",
    "add_white_noise",
    "mosaic_bayer",
    "demosaic_malvar",
    "propagate_sigma_rgb",
    "colored_noise_pipeline",
]

Pattern = Literal["rggb", "grbg", "gbrg", "bggr"]

# channel index (0=R, 1=G, 2=B) of each position in the 2x2 CFA tile
BAYER_PATTERNS: dict[str, np.ndarray] = {
    "rggb": np.array([[0, 1], [1, 2]]),
    "grbg": np.array([[1, 0], [2, 1]]),
    "gbrg": np.array([[1, 2], [0, 1]]),
    "bggr": np.array([[2, 1], [1, 0]]),
}

# gradient-corrected bilinear stencils, in units of 1/8 (gains 1/2, 5/8, 3/4)
K_GREEN_AT_CHROMA = np.array([
    [0.0, 0.0, -1.0, 0.0, 0.0],
    [0.0, 0.0, 2.0, 0.0, 0.0],
    [-1.0, 2.0, 4.0, 2.0, -1.0],
    [0.0, 0.0, 2.0, 0.0, 0.0],
    [0.0, 0.0, -1.0, 0.0, 0.0],
]) / 8.0
K_CHROMA_AT_GREEN_H = np.array([  # same-row chroma neighbors left/right
    [0.0, 0.0, 0.5, 0.0, 0.0],
    [0.0, -1.0, 0.0, -1.0, 0.0],
    [-1.0, 4.0, 5.0, 4.0, -1.0],
    [0.0, -1.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.5, 0.0, 0.0],
]) / 8.0
K_CHROMA_AT_GREEN_V = K_CHROMA_AT_GREEN_H.T.copy()
K_CHROMA_AT_CHROMA = np.array([  # R at B sites and B at R sites
    [0.0, 0.0, -1.5, 0.0, 0.0],
    [0.0, 2.0, 0.0, 2.0, 0.0],
    [-1.5, 0.0, 6.0, 0.0, -1.5],
    [0.0, 2.0, 0.0, 2.0, 0.0],
    [0.0, 0.0, -1.5, 0.0, 0.0],
]) / 8.0


@dataclass(frozen=True)
class NoiseSpec:
    """Noise configuration; ``sigma`` on the 0-255 scale."""

    sigma: float
    seed: int = 0
    domain: Literal["white", "bayer"] = "white"

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.domain not in ("white", "bayer"):
            raise ValueError("domain must be 'white' or 'bayer'")

    @property
    def sigma_unit(self) -> float:
        """Noise std on the internal [0, 1] intensity scale."""
        return self.sigma / 255.0


@dataclass(frozen=True)
class RgbSigma:
    """Effective per-channel noise std after demosaicing (input scale)."""

    r: float
    g: float
    b: float

    @property
    def mean(self) -> float:
        """Single shared sigma used to parameterize the filter."""
        return (self.r + self.g + self.b) / 3.0


def add_white_noise(img: np.ndarray, spec: NoiseSpec) -> np.ndarray:
    """Add independent G(0, sigma^2) to every sample; no clipping."""
    img = validate_image(img)
    if spec.domain != "white":
        raise ValueError("add_white_noise requires a white-domain NoiseSpec")
    if spec.sigma == 0:
        return img.copy()
    rng = np.random.default_rng(spec.seed)
    return img + rng.normal(0.0, spec.sigma_unit, size=img.shape)


def _pattern_grid(pattern: str) -> np.ndarray:
    try:
        return BAYER_PATTERNS[pattern.lower()]
    except KeyError:
        raise ValueError(f"unknown Bayer pattern {pattern!r}") from None


def _site_masks(shape: tuple[int, int], pattern: str):
    """Boolean masks of the R/G/B sample sites for the given pattern."""
    grid = _pattern_grid(pattern)
    rows, cols = np.mgrid[0:shape[0], 0:shape[1]]
    site = grid[rows % 2, cols % 2]
    return site == 0, site == 1, site == 2


def _red_row_mask(shape: tuple[int, int], pattern: str) -> np.ndarray:
    """True on rows whose chroma samples are red."""
    grid = _pattern_grid(pattern)
    has_red = (grid[:, 0] == 0) | (grid[:, 1] == 0)
    rows = np.arange(shape[0]) % 2
    return np.repeat(has_red[rows][:, None], shape[1], axis=1)


def mosaic_bayer(img: np.ndarray, pattern: str = "rggb") -> np.ndarray:
    """Sample one channel per pixel into a single-channel CFA raster."""
    img = validate_image(img)
    if img.ndim != 3:
        raise ValueError("mosaic_bayer needs a 3-channel image")
    if img.shape[0] % 2 or img.shape[1] % 2:
        raise ValueError("CFA processing requires even image dimensions")
    masks = _site_masks(img.shape[:2], pattern)
    cfa = np.zeros(img.shape[:2])
    for channel, mask in enumerate(masks):
        cfa[mask] = img[..., channel][mask]
    return cfa


def demosaic_malvar(cfa: np.ndarray, pattern: str = "rggb") -> np.ndarray:
    """Reconstruct RGB from a CFA raster (linear 5x5 stencils, mirror borders)."""
    cfa = validate_image(cfa)
    if cfa.ndim != 2:
        raise ValueError("demosaic_malvar needs a single-channel CFA image")
    if cfa.shape[0] % 2 or cfa.shape[1] % 2:
        raise ValueError("CFA processing requires even image dimensions")
    mask_r, mask_g, mask_b = _site_masks(cfa.shape, pattern)
    red_row = _red_row_mask(cfa.shape, pattern)

    def conv(kernel):
        return ndimage.correlate(cfa, kernel, mode="mirror")

    green_est = conv(K_GREEN_AT_CHROMA)
    chroma_h = conv(K_CHROMA_AT_GREEN_H)
    chroma_v = conv(K_CHROMA_AT_GREEN_V)
    chroma_x = conv(K_CHROMA_AT_CHROMA)

    out = np.empty(cfa.shape + (3,))
    out[..., 1] = np.where(mask_g, cfa, green_est)
    out[..., 0] = np.where(
        mask_r, cfa,
        np.where(mask_g & red_row, chroma_h,
                 np.where(mask_g, chroma_v, chroma_x)),
    )
    out[..., 2] = np.where(
        mask_b, cfa,
        np.where(mask_g & ~red_row, chroma_h,
                 np.where(mask_g, chroma_v, chroma_x)),
    )
    return out


def propagate_sigma_rgb(sigma_bayer: float, pattern: str = "rggb") -> RgbSigma:
    """Per-channel output noise std for unit-variance CFA noise of ``sigma_bayer``.

    Each output sample is a linear combination of independent CFA samples,
    so its variance multiplier is the sum of squared stencil coefficients;
    native sites contribute exactly 1.  Channels average the multiplier
    over the four CFA phase classes.
    """
    if sigma_bayer < 0:
        raise ValueError("sigma must be >= 0")
    _pattern_grid(pattern)  # validate
    sq = lambda k: float(np.sum(k * k))
    g_factor = np.sqrt((1.0 + 1.0 + 2.0 * sq(K_GREEN_AT_CHROMA)) / 4.0)
    chroma_factor = np.sqrt(
        (1.0 + sq(K_CHROMA_AT_GREEN_H) + sq(K_CHROMA_AT_GREEN_V) + sq(K_CHROMA_AT_CHROMA)) / 4.0
    )
    return RgbSigma(
        r=sigma_bayer * chroma_factor,
        g=sigma_bayer * g_factor,
        b=sigma_bayer * chroma_factor,
    )


def colored_noise_pipeline(
    img: np.ndarray,
    spec: NoiseSpec,
    pattern: str = "rggb",
    clip_cfa: bool = False,
) -> tuple[np.ndarray, RgbSigma]:
    """Mosaic, add CFA-domain noise, demosaic; return noisy RGB + RgbSigma.

    Noise is injected only in the Bayer domain (the clean image is
    mosaiced first).  ``clip_cfa`` optionally clamps the noisy CFA to
    [0, 1] before demosaicing; off by default.  The returned ``RgbSigma``
    is on the same 0-255 scale as ``spec.sigma``.
    """
    if spec.domain != "bayer":
        raise ValueError("colored_noise_pipeline requires a bayer-domain NoiseSpec")
    cfa = mosaic_bayer(img, pattern)
    if spec.sigma > 0:
        rng = np.random.default_rng(spec.seed)
        cfa = cfa + rng.normal(0.0, spec.sigma_unit, size=cfa.shape)
    if clip_cfa:
        cfa = np.clip(cfa, 0.0, 1.0)
    noisy = demosaic_malvar(cfa, pattern)
    return noisy, propagate_sigma_rgb(spec.sigma, pattern)
