import numpy as np
import pytest

from snn_nlm.core import NlmParams, PatchRef, pad_mirror, patch_sq_distance, validate_image


class TestPadMirror:
    def test_single_pixel(self):
        img = np.array([[0.3]])
        out = pad_mirror(img, 1)
        np.testing.assert_array_equal(out, np.full((3, 3), 0.3))

    def test_row_reflection_skips_edge_pixel(self):
        img = np.array([[0.1, 0.2, 0.3]])
        out = pad_mirror(img, 1)
        np.testing.assert_array_equal(out[1], [0.2, 0.1, 0.2, 0.3, 0.2])

    def test_zero_margin_is_identity(self, rng):
        img = rng.uniform(size=(5, 7))
        out = pad_mirror(img, 0)
        np.testing.assert_array_equal(out, img)

    def test_inbounds_patches_unchanged(self, rng):
        img = rng.uniform(size=(6, 8, 3))
        out = pad_mirror(img, 4)
        np.testing.assert_array_equal(out[4:-4, 4:-4], img)

    def test_negative_margin_rejected(self):
        with pytest.raises(ValueError):
            pad_mirror(np.zeros((3, 3)), -1)


class TestPatchSqDistance:
    def test_identical_patches(self, rng):
        img = rng.uniform(size=(8, 8))
        a = PatchRef(1, 1, 3)
        assert patch_sq_distance(img, a, a) == 0.0

    def test_single_pixel_value(self):
        img = np.array([[0.2, 0.5]])
        d = patch_sq_distance(img, PatchRef(0, 0, 1), PatchRef(1, 0, 1))
        assert d == pytest.approx(0.09, abs=1e-15)

    def test_symmetric_nonnegative(self, rng):
        img = rng.uniform(size=(10, 10, 3))
        for _ in range(50):
            ax, ay, bx, by = rng.integers(0, 7, size=4)
            a, b = PatchRef(ax, ay, 3), PatchRef(bx, by, 3)
            dab = patch_sq_distance(img, a, b)
            dba = patch_sq_distance(img, b, a)
            assert dab == dba
            assert dab >= 0.0
            if (ax, ay) != (bx, by):
                assert dab > 0.0

    def test_side_mismatch_rejected(self):
        img = np.zeros((9, 9))
        with pytest.raises(ValueError):
            patch_sq_distance(img, PatchRef(0, 0, 3), PatchRef(0, 0, 5))

    def test_out_of_bounds_rejected(self):
        img = np.zeros((4, 4))
        with pytest.raises(ValueError):
            patch_sq_distance(img, PatchRef(2, 2, 3), PatchRef(0, 0, 3))

    def test_replica_distance_chi_square_moments(self):
        # noisy replicas of one patch: patch-mean squared distance is a
        # scaled chi-square: mean 2 sigma^2, variance 8 sigma^4 / P
        rng = np.random.default_rng(7)
        sigma = 0.1
        n_el = 9
        trials = 120_000
        base = rng.uniform(0.2, 0.8, size=(1, n_el))
        a = base + rng.normal(0, sigma, size=(trials, n_el))
        b = base + rng.normal(0, sigma, size=(trials, n_el))
        d2 = np.mean((a - b) ** 2, axis=1)
        assert np.mean(d2) == pytest.approx(2 * sigma**2, rel=0.05)
        assert np.var(d2) == pytest.approx(8 * sigma**4 / n_el, rel=0.05)


class TestNlmParams:
    def test_defaults(self):
        p = NlmParams(sigma=0.1, h=0.075, n_neighbors=16)
        assert p.patch_side == 3
        assert p.search_side == 21
        assert p.pad_margin == 1 + 10

    @pytest.mark.parametrize("kwargs", [
        dict(sigma=0.1, h=0.1, n_neighbors=16, patch_side=4),
        dict(sigma=0.1, h=0.1, n_neighbors=16, search_side=20),
        dict(sigma=0.1, h=0.1, n_neighbors=16, patch_side=9, search_side=7),
        dict(sigma=0.1, h=0.1, n_neighbors=0),
        dict(sigma=0.1, h=0.1, n_neighbors=26, search_side=5),
        dict(sigma=0.1, h=0.1, n_neighbors=16, offset=1.5),
        dict(sigma=0.1, h=0.0, n_neighbors=16),
        dict(sigma=-0.1, h=0.1, n_neighbors=16),
    ])
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ValueError):
            NlmParams(**kwargs)


class TestValidateImage:
    def test_accepts_gray_and_rgb(self, rng):
        validate_image(rng.uniform(size=(4, 5)))
        validate_image(rng.uniform(size=(4, 5, 3)))

    @pytest.mark.parametrize("shape", [(4,), (4, 5, 2), (0, 5), (4, 5, 3, 1)])
    def test_rejects_bad_shapes(self, shape):
        with pytest.raises(ValueError):
            validate_image(np.zeros(shape))

    def test_rejects_integer_samples(self):
        with pytest.raises(ValueError):
            validate_image(np.zeros((4, 4), dtype=np.uint8))
