"""Image/patch primitives: raster conventions, padding, patch distance.

Images are plain float64 numpy arrays, ``(H, W)`` for grayscale or
``(H, W, 3)`` for RGB, with samples nominally in ``[0, 1]`` (values may
leave the range after noise injection; they are only clipped on export).
8-bit files are mapped to this range by dividing by 255.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PatchRef",
    "NlmParams",
    "validate_image",
    "pad_mirror",
    "patch_sq_distance",
]


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check the (H, W) / (H, W, 3) float convention and return the array."""
    img = np.asarray(img)
    if img.ndim == 2:
        pass
    elif img.ndim == 3 and img.shape[2] == 3:
        pass
    else:
        raise ValueError(f"expected (H, W) or (H, W, 3) array, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError("image must have at least one row and one column")
    if not np.issubdtype(img.dtype, np.floating):
        raise ValueError("image samples must be floating point (scale 8-bit data by 1/255)")
    return img


def n_channels(img: np.ndarray) -> int:
    return 1 if img.ndim == 2 else img.shape[2]


@dataclass(frozen=True)
class PatchRef:
    """Square patch identified by its top-left pixel inside a given image.

    ``x`` is the column, ``y`` the row.  The patch holds ``side * side``
    pixels per channel and is never materialized unless needed.
    """

    x: int
    y: int
    side: int

    def __post_init__(self):
        if self.side < 1:
            raise ValueError("patch side must be >= 1")

    @property
    def center(self) -> tuple[int, int]:
        """(row, col) of the central pixel; side must be odd."""
        half = (self.side - 1) // 2
        return self.y + half, self.x + half


def check_patch_in_bounds(img: np.ndarray, ref: PatchRef) -> None:
    h, w = img.shape[:2]
    if ref.x < 0 or ref.y < 0 or ref.x + ref.side > w or ref.y + ref.side > h:
        raise ValueError(f"patch {ref} exceeds image bounds {h}x{w}")


@dataclass(frozen=True)
class NlmParams:
    """Filter configuration.

    ``sigma`` and ``h`` are expressed in pixel-intensity units (the [0, 1]
    scale); the CLI divides 0-255 values by 255 before building params.
    ``offset`` interpolates between plain nearest-neighbor selection (0)
    and selection centered on the expected noisy-replica distance (1).
    """

    sigma: float
    h: float
    n_neighbors: int
    offset: float = 0.0
    patch_side: int = 3
    search_side: int = 21

    def __post_init__(self):
        if self.patch_side < 1 or self.patch_side % 2 == 0:
            raise ValueError("patch_side must be odd and >= 1")
        if self.search_side % 2 == 0 or self.search_side < self.patch_side:
            raise ValueError("search_side must be odd and >= patch_side")
        if not 1 <= self.n_neighbors <= self.search_side**2:
            raise ValueError("n_neighbors must be in [1, search_side^2]")
        if not 0.0 <= self.offset <= 1.0:
            raise ValueError("offset must be in [0, 1]")
        if self.h <= 0:
            raise ValueError("h must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")

    @property
    def half_patch(self) -> int:
        return (self.patch_side - 1) // 2

    @property
    def half_search(self) -> int:
        return (self.search_side - 1) // 2

    @property
    def pad_margin(self) -> int:
        """Mirror-padding margin so every pixel owns a full search window."""
        return self.half_patch + self.half_search


def pad_mirror(img: np.ndarray, margin: int) -> np.ndarray:
    """Mirror-pad the spatial axes without repeating the edge pixel.

    A row ``[a, b, c]`` padded by one becomes ``[b, a, b, c, b]``.
    """
    img = validate_image(img)
    if margin < 0:
        raise ValueError("margin must be >= 0")
    if margin == 0:
        return img.copy()
    width = [(margin, margin), (margin, margin)] + [(0, 0)] * (img.ndim - 2)
    return np.pad(img, width, mode="reflect")


def patch_sq_distance(img: np.ndarray, a: PatchRef, b: PatchRef) -> float:
    """Mean squared per-element difference between two patches.

    All channels count toward the element total (3 * side^2 for RGB).
    Accumulation order is fixed: channels are subtotaled per pixel, pixels
    are accumulated in raster order, and the division by the element count
    happens once at the end.  The sliding-window distance kernel in
    ``filtering`` reproduces this order bit for bit.
    """
    if a.side != b.side:
        raise ValueError(f"patch sides differ: {a.side} vs {b.side}")
    check_patch_in_bounds(img, a)
    check_patch_in_bounds(img, b)
    pa = img[a.y:a.y + a.side, a.x:a.x + a.side]
    pb = img[b.y:b.y + b.side, b.x:b.x + b.side]
    d2 = (pa - pb) ** 2
    if d2.ndim == 3:
        d2 = d2[..., 0] + d2[..., 1] + d2[..., 2]
    total = 0.0
    for row in range(a.side):
        for col in range(a.side):
            total += d2[row, col]
    n_el = a.side * a.side * n_channels(img)
    return total / n_el
