import numpy as np
import pytest

from snn_nlm.core import NlmParams, PatchRef, pad_mirror, patch_sq_distance
from snn_nlm.filtering import _distance_stack, denoise_image, denoise_patch, nlm_weight
from snn_nlm.search import NeighborSet, collect_nn, collect_snn


def params_for(**overrides):
    base = dict(sigma=0.05, h=0.04, n_neighbors=5, offset=0.7,
                patch_side=3, search_side=5)
    base.update(overrides)
    return NlmParams(**base)


def naive_denoise(img, params, strategy):
    """Reference composition: collect, average, aggregate uniformly."""
    pad = params.pad_margin
    hp = params.half_patch
    padded = pad_mirror(img, pad)
    height, width = img.shape[:2]
    acc = np.zeros_like(img)
    count = np.zeros((height, width))
    collect = collect_nn if strategy == "nn" else collect_snn
    for i in range(height):
        for j in range(width):
            ref = PatchRef(x=j + pad - hp, y=i + pad - hp, side=params.patch_side)
            est = denoise_patch(padded, collect(padded, ref, params), params).values
            for ey in range(params.patch_side):
                for ex in range(params.patch_side):
                    qi, qj = i + ey - hp, j + ex - hp
                    if 0 <= qi < height and 0 <= qj < width:
                        acc[qi, qj] += est[ey, ex]
                        count[qi, qj] += 1
    if img.ndim == 3:
        count = count[..., None]
    return acc / count


class TestNlmWeight:
    def test_reference_values(self):
        p = params_for(sigma=0.1, h=0.2)
        assert nlm_weight(0.0, p) == 1.0
        assert nlm_weight(2 * 0.1**2, p) == 1.0
        assert nlm_weight(2 * 0.1**2 + 0.2**2, p) == pytest.approx(np.exp(-1), rel=1e-12)

    def test_bounded_and_decreasing(self, rng):
        p = params_for()
        d = np.sort(rng.uniform(0, 1, 100))
        w = nlm_weight(d, p)
        assert np.all(w > 0) and np.all(w <= 1)
        assert np.all(np.diff(w) <= 0)


class TestDenoisePatch:
    def test_single_self_neighbor_is_identity(self, rng):
        img = rng.uniform(size=(9, 9))
        p = params_for(n_neighbors=1)
        ref = PatchRef(3, 3, 3)
        ns = NeighborSet(ref=ref, entries=((ref, 0.0),), selection_keys=np.zeros(1))
        est = denoise_patch(img, ns, p)
        np.testing.assert_array_equal(est.values, img[3:6, 3:6])

    def test_equal_distances_give_arithmetic_mean(self, rng):
        img = rng.uniform(size=(9, 9))
        p = params_for()
        a, b = PatchRef(1, 1, 3), PatchRef(5, 5, 3)
        ns = NeighborSet(ref=a, entries=((a, 0.01), (b, 0.01)), selection_keys=np.zeros(2))
        est = denoise_patch(img, ns, p)
        expected = 0.5 * (img[1:4, 1:4] + img[5:8, 5:8])
        np.testing.assert_allclose(est.values, expected, rtol=1e-15)

    def test_three_single_pixel_neighbors_formula(self):
        sigma, h = 0.1, 0.2
        img = np.array([[0.0, 0.5, 1.0]])
        p = params_for(sigma=sigma, h=h, patch_side=1, search_side=3, n_neighbors=3)
        refs = [PatchRef(0, 0, 1), PatchRef(1, 0, 1), PatchRef(2, 0, 1)]
        dists = [0.0, 2 * sigma**2, 2 * sigma**2 + h**2]
        ns = NeighborSet(ref=refs[0], entries=tuple(zip(refs, dists)),
                         selection_keys=np.array(dists))
        est = denoise_patch(img, ns, p)
        expected = (1.0 * 0.0 + 1.0 * 0.5 + np.exp(-1) * 1.0) / (2.0 + np.exp(-1))
        assert est.values[0, 0] == pytest.approx(expected, rel=1e-14)

    def test_values_convex_per_element(self, rng):
        img = rng.uniform(size=(11, 11))
        p = params_for(n_neighbors=4)
        ref = PatchRef(4, 4, 3)
        ns = collect_nn(img, ref, p)
        est = denoise_patch(img, ns, p)
        stack = np.stack([img[r.y:r.y + 3, r.x:r.x + 3] for r in ns.refs])
        assert np.all(est.values >= stack.min(axis=0) - 1e-15)
        assert np.all(est.values <= stack.max(axis=0) + 1e-15)

    def test_empty_neighbors_rejected(self):
        p = params_for()
        ns = NeighborSet(ref=PatchRef(0, 0, 3), entries=(), selection_keys=np.zeros(0))
        with pytest.raises(ValueError):
            denoise_patch(np.zeros((5, 5)), ns, p)


class TestDistanceStack:
    def test_bit_identical_to_scalar_distances(self, rng):
        for shape in [(8, 9), (8, 9, 3)]:
            img = rng.uniform(size=shape)
            params = params_for()
            padded = pad_mirror(img, params.pad_margin)
            stack = _distance_stack(padded, params, 0, img.shape[0], img.shape[1])
            pad, hp, hs = params.pad_margin, params.half_patch, params.half_search
            for i in range(img.shape[0]):
                for j in range(img.shape[1]):
                    ref = PatchRef(x=j + pad - hp, y=i + pad - hp, side=3)
                    k = 0
                    for dy in range(-hs, hs + 1):
                        for dx in range(-hs, hs + 1):
                            cand = PatchRef(ref.x + dx, ref.y + dy, 3)
                            assert stack[k, i, j] == patch_sq_distance(padded, ref, cand)
                            k += 1


class TestDenoiseImage:
    def test_constant_image_unchanged(self):
        # identity up to aggregation round-off (an ulp per value)
        img = np.full((16, 16), 0.37)
        p = params_for(sigma=0.1)
        for strategy in ("nn", "snn"):
            out = denoise_image(img, p, strategy)
            np.testing.assert_allclose(out, img, rtol=0, atol=5e-16)

    @pytest.mark.parametrize("shape", [(9, 11), (9, 11, 3)])
    @pytest.mark.parametrize("strategy", ["nn", "snn"])
    def test_matches_naive_composition(self, rng, shape, strategy):
        img = rng.uniform(size=shape)
        for n_nb in (1, 5, 25):
            p = params_for(n_neighbors=n_nb)
            fast = denoise_image(img, p, strategy)
            slow = naive_denoise(img, p, strategy)
            np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-13)

    def test_output_within_input_range(self, rng):
        img = rng.uniform(0.2, 0.8, size=(20, 20))
        p = params_for(n_neighbors=9, offset=1.0)
        out = denoise_image(img, p, "snn")
        assert out.min() >= img.min() - 1e-12
        assert out.max() <= img.max() + 1e-12

    def test_full_window_strategies_bit_identical(self, rng):
        img = rng.uniform(size=(14, 14))
        p = params_for(n_neighbors=25, offset=1.0)
        np.testing.assert_array_equal(
            denoise_image(img, p, "nn"), denoise_image(img, p, "snn")
        )

    def test_thread_count_does_not_change_bits(self, rng):
        img = rng.uniform(size=(40, 22))
        p = params_for(n_neighbors=8)
        ref = denoise_image(img, p, "snn", threads=1)
        for threads in (2, 8):
            np.testing.assert_array_equal(
                ref, denoise_image(img, p, "snn", threads=threads)
            )

    def test_translation_equivariance_on_interior(self, rng):
        base = rng.uniform(size=(24, 24))
        a = base[0:20, :]
        b = base[1:21, :]
        p = params_for(n_neighbors=6)
        da = denoise_image(a, p, "snn")
        db = denoise_image(b, p, "snn")
        m = p.pad_margin + 1
        np.testing.assert_array_equal(da[m + 1:20 - m], db[m:19 - m])

    def test_noise_free_step_edge_preserved(self):
        img = np.zeros((14, 14))
        img[:, 7:] = 1.0
        p = params_for(sigma=0.0, n_neighbors=9, offset=0.0, h=0.05)
        out = denoise_image(img, p, "nn")
        # far columns see only flat windows and stay put (ulp round-off)
        np.testing.assert_allclose(out[:, :2], img[:, :2], rtol=0, atol=5e-16)
        np.testing.assert_allclose(out[:, -2:], img[:, -2:], rtol=0, atol=5e-16)
        # profile stays monotone and crosses between the original columns
        profile = out[7]
        assert np.all(np.diff(profile) >= -1e-15)
        assert profile[6] < 0.5 < profile[7]

    def test_deterministic_across_runs(self, rng):
        img = rng.uniform(size=(15, 15))
        p = params_for(n_neighbors=7)
        np.testing.assert_array_equal(
            denoise_image(img, p, "snn"), denoise_image(img, p, "snn")
        )

    def test_bad_threads_rejected(self, rng):
        with pytest.raises(ValueError):
            denoise_image(rng.uniform(size=(8, 8)), params_for(), "snn", threads=0)
