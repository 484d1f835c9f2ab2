"""NLM weighting, per-patch averaging and whole-image denoising.

``denoise_image`` is the production path.  It works on mirror-padded data
so every pixel owns a full search window, computes the per-offset patch
distances with a sliding kernel that reproduces the scalar
``patch_sq_distance`` accumulation order bit for bit, selects neighbors
per pixel (stable sort, window raster tie-break), and aggregates the
overlapping patch estimates by uniform averaging.

Determinism contracts, all covered by tests:

* every reduction over neighbors is accumulated in window raster order,
  never in selection order, so strategies that select the same set
  produce bit-identical output;
* the image is cut into strips whose extent depends only on the image
  size, worker results are merged in strip order, so the output is
  independent of the thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import NlmParams, PatchRef, n_channels, pad_mirror, validate_image
from .search import NeighborSet

__all__ = ["PatchEstimate", "nlm_weight", "denoise_patch", "denoise_image"]

Strategy = Literal["nn", "snn"]

# elements per strip distance plane; keeps peak memory around a few hundred MB
_STRIP_BUDGET = 6_000_000


@dataclass(frozen=True)
class PatchEstimate:
    """Denoised values for one reference patch (a convex combination)."""

    ref: PatchRef
    values: np.ndarray


def nlm_weight(sq_dist: float, params: NlmParams):
    """Weight of a neighbor at the given squared distance.

    ``exp(-max(0, sq_dist - 2 sigma^2) / h^2)``: distances up to the
    expected noisy-replica distance ``2 sigma^2`` get full weight, beyond
    that the weight decays with bandwidth ``h``.  Accepts arrays.
    """
    excess = np.maximum(0.0, np.asarray(sq_dist) - 2.0 * params.sigma**2)
    return np.exp(-excess / params.h**2)[()]


def denoise_patch(img: np.ndarray, neighbors: NeighborSet, params: NlmParams) -> PatchEstimate:
    """Element-wise weighted mean of the neighbor patches.

    Accumulation runs in raster order of the neighbor positions (not in
    selection order), matching the canonical order of the image engine.
    """
    if len(neighbors) == 0:
        raise ValueError("neighbor set is empty")
    by_position = sorted(neighbors.entries, key=lambda e: (e[0].y, e[0].x))
    num = None
    den = 0.0
    for ref, sq_dist in by_position:
        w = float(nlm_weight(sq_dist, params))
        patch = img[ref.y:ref.y + ref.side, ref.x:ref.x + ref.side]
        contrib = w * patch
        num = contrib if num is None else num + contrib
        den += w
    return PatchEstimate(ref=neighbors.ref, values=num / den)


def _strategy_offset(params: NlmParams, strategy: Strategy) -> float:
    if strategy == "nn":
        return 0.0
    if strategy == "snn":
        return params.offset * 2.0 * params.sigma**2
    raise ValueError(f"unknown strategy {strategy!r}")


def _distance_stack(padded: np.ndarray, params: NlmParams, y0: int, y1: int, width: int) -> np.ndarray:
    """Per-offset patch distances for reference rows ``[y0, y1)``.

    Returns ``(search_side^2, y1 - y0, width)``; plane ``k`` holds
    ``patch_sq_distance`` between the patch centered at each pixel and the
    patch at window offset ``k`` (raster enumeration of the window).
    Per-pixel accumulation order matches the scalar function exactly.
    """
    hp, hs = params.half_patch, params.half_search
    pad = params.pad_margin
    side = params.patch_side
    n_band = y1 - y0
    n_off = params.search_side**2
    multi = padded.ndim == 3
    n_el = side * side * (3 if multi else 1)

    stack = np.empty((n_off, n_band, width))
    r0, r1 = y0 + pad - hp, y1 + pad + hp
    c0, c1 = pad - hp, width + pad + hp
    base = padded[r0:r1, c0:c1]
    k = 0
    for dy in range(-hs, hs + 1):
        for dx in range(-hs, hs + 1):
            shifted = padded[r0 + dy:r1 + dy, c0 + dx:c1 + dx]
            d2 = base - shifted
            d2 = d2 * d2
            if multi:
                d2 = d2[..., 0] + d2[..., 1] + d2[..., 2]
            acc = d2[0:n_band, 0:width].copy()
            for ey in range(side):
                for ex in range(side):
                    if ey == 0 and ex == 0:
                        continue
                    acc += d2[ey:ey + n_band, ex:ex + width]
            np.divide(acc, n_el, out=stack[k])
            k += 1
    return stack


def _offsets(params: NlmParams) -> list[tuple[int, int]]:
    hs = params.half_search
    return [(dy, dx) for dy in range(-hs, hs + 1) for dx in range(-hs, hs + 1)]


def _denoise_strip(padded, params, strategy, y0, y1, width):
    """Aggregation contributions of reference rows [y0, y1).

    Returns ``(numerator, estimate_count_rows)`` where numerator covers
    output rows ``[y0 - half_patch, y1 + half_patch)`` unclipped.
    """
    hp = params.half_patch
    pad = params.pad_margin
    n_off = params.search_side**2
    two_s2 = 2.0 * params.sigma**2
    inv_h2 = 1.0 / params.h**2
    multi = padded.ndim == 3
    n_band = y1 - y0
    n_out = n_band + 2 * hp

    dist = _distance_stack(padded, params, y0, y1, width)
    key_offset = _strategy_offset(params, strategy)
    keys = dist if key_offset == 0.0 else np.abs(dist - key_offset)
    order = np.argsort(keys, axis=0, kind="stable")[: params.n_neighbors]
    del keys
    d_sel = np.take_along_axis(dist, order, axis=0)
    w_sel = np.exp(-np.maximum(0.0, d_sel - two_s2) * inv_h2)
    weights = np.zeros_like(dist)
    np.put_along_axis(weights, order, w_sel, axis=0)
    del dist, order, d_sel, w_sel

    # normalize per reference pixel; raster-order reduction over offsets
    wsum = weights[0].copy()
    for k in range(1, n_off):
        wsum += weights[k]
    weights /= wsum

    num_shape = (n_out, width, 3) if multi else (n_out, width)
    num = np.zeros(num_shape)
    z = np.zeros((n_band + 4 * hp, width + 4 * hp))
    box = np.empty((n_out, width))
    for k, (dy, dx) in enumerate(_offsets(params)):
        z[2 * hp:2 * hp + n_band, 2 * hp:2 * hp + width] = weights[k]
        # box rows span [y0 - hp, y1 + hp) while box cols span [0, width),
        # hence the extra hp in the column slice origin
        first = True
        for s in range(2 * hp + 1):
            for t in range(2 * hp + 1):
                sl = z[s:s + n_out, hp + t:hp + t + width]
                if first:
                    box[...] = sl
                    first = False
                else:
                    box += sl
        rows = slice(y0 - hp + pad + dy, y1 + hp + pad + dy)
        cols = slice(pad + dx, pad + dx + width)
        shifted = padded[rows, cols]
        if multi:
            num += shifted * box[..., None]
        else:
            num += shifted * box
    return num


def _estimate_counts(length: int, hp: int) -> np.ndarray:
    """How many patch estimates cover each position along one axis."""
    idx = np.arange(length)
    return (np.minimum(idx + hp, length - 1) - np.maximum(idx - hp, 0) + 1).astype(float)


def _strip_bounds(height: int, width: int, params: NlmParams) -> list[tuple[int, int]]:
    # strip extent is a function of the image only, never of the thread
    # count, so outputs cannot depend on scheduling
    n_off = params.search_side**2
    rows = max(4, _STRIP_BUDGET // (n_off * width))
    return [(y, min(y + rows, height)) for y in range(0, height, rows)]


def denoise_image(
    img: np.ndarray,
    params: NlmParams,
    strategy: Strategy = "snn",
    threads: int = 1,
) -> np.ndarray:
    """Denoise every pixel by patch-wise weighted averaging and aggregation.

    A reference patch is processed at every pixel position (stride 1);
    each output pixel is the uniform average of all overlapping patch
    estimates that cover it.  The output has the input's shape and is a
    convex combination of input values.
    """
    img = validate_image(img)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    height, width = img.shape[:2]
    hp = params.half_patch
    padded = pad_mirror(img, params.pad_margin)
    strips = _strip_bounds(height, width, params)

    def run(bounds):
        y0, y1 = bounds
        return _denoise_strip(padded, params, strategy, y0, y1, width)

    if threads == 1 or len(strips) == 1:
        partials = [run(s) for s in strips]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(run, strips))

    out = np.zeros_like(img)
    # merge in strip order: overlapping borders accumulate deterministically
    for (y0, y1), num in zip(strips, partials):
        lo = max(0, y0 - hp)
        hi = min(height, y1 + hp)
        out[lo:hi] += num[lo - (y0 - hp):hi - (y0 - hp)]
    cover = np.outer(_estimate_counts(height, hp), _estimate_counts(width, hp))
    if img.ndim == 3:
        cover = cover[..., None]
    out /= cover
    return out
