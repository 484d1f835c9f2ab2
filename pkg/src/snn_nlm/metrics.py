"""Image quality metrics: PSNR and single-scale SSIM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import validate_image

__all__ = ["QualityReport", "psnr", "ssim", "luma"]

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    ssim: float


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """10 log10(peak^2 / MSE) over all samples; inf for identical images."""
    a, b = validate_image(a), validate_image(b)
    _check_same_shape(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


def luma(img: np.ndarray) -> np.ndarray:
    """BT.601 luma of an RGB image; grayscale passes through."""
    img = validate_image(img)
    if img.ndim == 2:
        return img
    return 0.299 * img[..., 0] + 0.587 * img[..., 1] + 0.114 * img[..., 2]


def _gaussian_window() -> np.ndarray:
    half = (_SSIM_WINDOW - 1) // 2
    x = np.arange(-half, half + 1, dtype=float)
    g = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA**2))
    return g / g.sum()


def _windowed_mean(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    half = (_SSIM_WINDOW - 1) // 2
    out = ndimage.correlate1d(img, kernel, axis=0, mode="constant")
    out = ndimage.correlate1d(out, kernel, axis=1, mode="constant")
    return out[half:-half, half:-half]  # keep positions with full support only


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity over all fully supported window positions.

    Gaussian 11x11 window (std 1.5), stabilizers K1 = 0.01 / K2 = 0.03 at
    unit dynamic range.  RGB inputs are compared on BT.601 luma.
    """
    a, b = validate_image(a), validate_image(b)
    _check_same_shape(a, b)
    x, y = luma(a), luma(b)
    if min(x.shape) < _SSIM_WINDOW:
        raise ValueError(f"image smaller than the {_SSIM_WINDOW}x{_SSIM_WINDOW} SSIM window")
    kernel = _gaussian_window()
    mu_x = _windowed_mean(x, kernel)
    mu_y = _windowed_mean(y, kernel)
    xx = _windowed_mean(x * x, kernel) - mu_x * mu_x
    yy = _windowed_mean(y * y, kernel) - mu_y * mu_y
    xy = _windowed_mean(x * y, kernel) - mu_x * mu_y
    c1 = _SSIM_K1**2
    c2 = _SSIM_K2**2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
    return float(np.mean(num / den))
