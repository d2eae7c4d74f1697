import numpy as np
import pytest

from bodymask.image_model import ScalarImage2D
from bodymask.normalization import (
    DEFAULT_LIMIT,
    ZeroVarianceError,
    clip_outliers,
    clipped_fraction,
    normalize_for_uint8,
    zscore,
)


def random_image(seed, shape=(32, 32)):
    rng = np.random.Generator(np.random.Philox(seed))
    return ScalarImage2D(rng.normal(50.0, 20.0, size=shape))


class TestZscore:
    def test_mean_zero_std_one(self):
        z = zscore(random_image(1))
        assert abs(z.data.mean()) < 1e-9
        assert abs(z.data.std() - 1.0) < 1e-9

    def test_population_std_not_sample(self):
        # With ddof=1 a two-pixel image would give std sqrt(2), z = ±1/sqrt(2).
        z = zscore(ScalarImage2D(np.array([[0.0, 2.0]])))
        assert np.allclose(z.data, [[-1.0, 1.0]])

    def test_constant_image_raises(self):
        with pytest.raises(ZeroVarianceError):
            zscore(ScalarImage2D(np.full((4, 4), 3.0)))


class TestClipOutliers:
    def test_limits_applied_exactly(self):
        z = ScalarImage2D(np.array([[-5.0, -3.0, 0.0, 3.0, 5.0]]))
        clipped = clip_outliers(z, 3.0)
        assert list(clipped.data[0]) == [-3.0, -3.0, 0.0, 3.0, 3.0]

    def test_nonpositive_limit_rejected(self):
        z = ScalarImage2D(np.zeros((2, 2)))
        with pytest.raises(ValueError, match="limit"):
            clip_outliers(z, 0.0)


class TestNormalizeForUint8:
    def test_endpoints_map_exactly(self):
        # Values beyond ±limit clip to exactly ±limit, which must map to 0/255.
        rng = np.random.Generator(np.random.Philox(9))
        data = rng.normal(size=(64, 64))
        data[0, 0] = -50.0
        data[0, 1] = 50.0
        out = normalize_for_uint8(ScalarImage2D(data), limit=3.0)
        assert out.data[0, 0] == 0
        assert out.data[0, 1] == 255

    def test_unit_z_hits_extremes_at_limit_one(self):
        # A symmetric two-value image has z = ±1; with limit 1 that is 0 and 255.
        out = normalize_for_uint8(ScalarImage2D(np.array([[0.0, 2.0]])), limit=1.0)
        assert list(out.data[0]) == [0, 255]

    def test_zero_z_maps_to_128(self):
        # (0 + L) * 255 / 2L = 127.5, which rounds half away from zero to 128.
        data = np.array([[0.0, 1.0, 2.0]])
        out = normalize_for_uint8(ScalarImage2D(data), limit=3.0)
        assert out.data[0, 1] == 128

    def test_default_limit_is_three(self):
        assert DEFAULT_LIMIT == 3.0

    def test_affine_invariance(self):
        rng = np.random.Generator(np.random.Philox(11))
        img = rng.normal(100.0, 30.0, size=(32, 32))
        base = normalize_for_uint8(ScalarImage2D(img), limit=3.0)
        scaled = normalize_for_uint8(ScalarImage2D(2.5 * img + 17.0), limit=3.0)
        assert np.array_equal(base.data, scaled.data)

    def test_zero_variance_propagates(self):
        with pytest.raises(ZeroVarianceError):
            normalize_for_uint8(ScalarImage2D(np.ones((3, 3))), limit=3.0)


class TestClippedFraction:
    def test_counts_only_exact_extremes(self):
        out = normalize_for_uint8(ScalarImage2D(np.array([[0.0, 2.0]])), limit=1.0)
        assert clipped_fraction(out) == 1.0

    def test_gaussian_tail_mass(self):
        rng = np.random.Generator(np.random.Philox(13))
        img = ScalarImage2D(rng.normal(size=(1000, 1000)))
        frac = clipped_fraction(normalize_for_uint8(img, limit=3.0))
        assert abs(frac - 0.0027) < 0.0015
