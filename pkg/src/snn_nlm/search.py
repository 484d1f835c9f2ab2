"""Neighbor collection inside a search window, by distance or by offset distance.

Both collectors scan every stride-1 candidate position of the window (the
reference itself included), rank by the selection key and keep the best
``n_neighbors``.  Ties are broken by the raster order of the window scan so
results are reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NlmParams, PatchRef, check_patch_in_bounds, patch_sq_distance

__all__ = ["NeighborSet", "collect_nn", "collect_snn"]


@dataclass(frozen=True)
class NeighborSet:
    """Ordered neighbor selection for one reference patch.

    ``entries`` holds ``(PatchRef, raw squared distance)`` pairs sorted by
    ascending ``selection_keys``; for plain nearest-neighbor selection the
    key is the squared distance itself.
    """

    ref: PatchRef
    entries: tuple[tuple[PatchRef, float], ...]
    selection_keys: np.ndarray

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def refs(self) -> tuple[PatchRef, ...]:
        return tuple(r for r, _ in self.entries)

    @property
    def sq_distances(self) -> np.ndarray:
        return np.array([d for _, d in self.entries])


def _window_candidates(img: np.ndarray, ref: PatchRef, params: NlmParams):
    """Candidate PatchRefs of the search window, in raster scan order."""
    if ref.side != params.patch_side:
        raise ValueError("reference patch side must match params.patch_side")
    check_patch_in_bounds(img, ref)
    hs = params.half_search
    cands = []
    for dy in range(-hs, hs + 1):
        for dx in range(-hs, hs + 1):
            cands.append(PatchRef(ref.x + dx, ref.y + dy, ref.side))
    # the whole window must fit; callers pad the image beforehand
    check_patch_in_bounds(img, cands[0])
    check_patch_in_bounds(img, cands[-1])
    return cands


def _collect(img: np.ndarray, ref: PatchRef, params: NlmParams, key_offset: float) -> NeighborSet:
    cands = _window_candidates(img, ref, params)
    dists = [patch_sq_distance(img, ref, c) for c in cands]
    keys = [abs(d - key_offset) for d in dists]
    # sorted() is stable: equal keys keep window raster order
    order = sorted(range(len(cands)), key=lambda i: keys[i])[: params.n_neighbors]
    entries = tuple((cands[i], dists[i]) for i in order)
    return NeighborSet(
        ref=ref,
        entries=entries,
        selection_keys=np.array([keys[i] for i in order]),
    )


def collect_nn(img: np.ndarray, ref: PatchRef, params: NlmParams) -> NeighborSet:
    """Keep the ``n_neighbors`` candidates with the smallest squared distance."""
    return _collect(img, ref, params, key_offset=0.0)


def collect_snn(img: np.ndarray, ref: PatchRef, params: NlmParams) -> NeighborSet:
    """Keep candidates whose squared distance is closest to ``offset * 2 sigma^2``.

    The expected squared distance between two noisy replicas of the same
    patch is ``2 sigma^2``; aiming the selection there favors neighbors
    whose noise is uncorrelated with the reference instead of neighbors
    that happen to share its noise.  ``offset = 0`` reduces to
    :func:`collect_nn` exactly.
    """
    return _collect(img, ref, params, key_offset=params.offset * 2.0 * params.sigma**2)
