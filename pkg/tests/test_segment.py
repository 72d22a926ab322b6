import numpy as np
import pytest

from jetseg.errors import ConfigError, DegenerateError
from jetseg.segment import (
    DEFAULT_BANDS,
    ChanVeseParams,
    ThresholdBands,
    auto_bands,
    chanvese_binary,
    chanvese_segment,
    gmm_segment,
    kmeans_segment,
    median_filter,
    threshold_segment,
)


class TestThreshold:
    def test_band_assignment(self):
        img = np.array([[50, 200, 90, 10]], dtype=np.uint8)
        mask = threshold_segment(img, DEFAULT_BANDS)
        assert mask.labels.tolist() == [[1, 3, 0, 0]]

    def test_default_bands_are_canonical(self):
        assert DEFAULT_BANDS.outer == (31, 85)
        assert DEFAULT_BANDS.middle == (101, 170)
        assert DEFAULT_BANDS.central == (171, 255)

    def test_overlapping_bands_rejected(self):
        with pytest.raises(ConfigError):
            ThresholdBands(outer=(31, 110), middle=(101, 170), central=(171, 255))

    def test_inverted_band_rejected(self):
        with pytest.raises(ConfigError):
            ThresholdBands(outer=(85, 31), middle=(101, 170), central=(171, 255))

    def test_gap_maps_to_background(self):
        img = np.array([[86, 100, 30, 0]], dtype=np.uint8)
        mask = threshold_segment(img)
        assert mask.labels.tolist() == [[0, 0, 0, 0]]

    def test_idempotent_under_null_median(self, rng):
        img = rng.integers(0, 256, size=(12, 12), dtype=np.uint8)
        direct = threshold_segment(img)
        filtered = threshold_segment(median_filter(img, 0))
        assert np.array_equal(direct.labels, filtered.labels)

    def test_invariant_under_gap_permutations(self, rng):
        img = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
        baseline = threshold_segment(img)
        # remap every out-of-band intensity to a different out-of-band value
        gaps = [v for v in range(256)
                if not (31 <= v <= 85 or 101 <= v <= 170 or 171 <= v <= 255)]
        permuted = img.copy()
        shuffled = rng.permutation(gaps)
        lut = dict(zip(gaps, shuffled))
        for v, w in lut.items():
            permuted[img == v] = w
        assert np.array_equal(threshold_segment(permuted).labels, baseline.labels)

    def test_all_segmenters_respect_output_contract(self, rng):
        img = rng.integers(0, 256, size=(16, 24), dtype=np.uint8)
        outputs = [
            threshold_segment(img),
            kmeans_segment(img, seed=1)[0],
            gmm_segment(img, seed=1)[0],
            chanvese_segment(img).mask,
        ]
        for mask in outputs:
            assert mask.labels.shape == img.shape
            assert set(np.unique(mask.labels)) <= {0, 1, 2, 3}


class TestMedianFilter:
    def test_radius_zero_identity(self, rng):
        img = rng.integers(0, 256, size=(7, 9), dtype=np.uint8)
        assert np.array_equal(median_filter(img, 0), img)

    def test_constant_unchanged(self):
        img = np.full((5, 5), 42, dtype=np.uint8)
        assert np.array_equal(median_filter(img, 2), img)

    def test_center_outlier_replaced(self):
        img = np.array([[1, 2, 3], [4, 100, 6], [7, 8, 9]], dtype=np.uint8)
        out = median_filter(img, 1)
        assert out[1, 1] == 6  # median of {1,2,3,4,6,7,8,9,100}

    def test_matches_bruteforce_oracle(self, rng):
        img = rng.integers(0, 256, size=(10, 12), dtype=np.uint8)
        out = median_filter(img, 1)
        padded = np.pad(img, 1, mode="edge")
        for r in range(10):
            for c in range(12):
                window = padded[r : r + 3, c : c + 3]
                assert out[r, c] == np.median(window)


class TestAutoBands:
    def test_four_separated_modes(self, rng):
        parts = [
            np.clip(rng.normal(center, 3, size=2000), 0, 255).astype(np.uint8)
            for center in (10, 60, 130, 210)
        ]
        img = np.concatenate(parts).reshape(100, 80)
        result = auto_bands([img])
        assert not result.fallback
        bands = result.bands
        assert bands.outer[0] <= 60 <= bands.outer[1]
        assert bands.middle[0] <= 130 <= bands.middle[1]
        assert bands.central[0] <= 210 <= bands.central[1]

    def test_constant_images_fall_back(self):
        result = auto_bands([np.full((8, 8), 50, dtype=np.uint8)])
        assert result.fallback
        assert result.bands == DEFAULT_BANDS

    def test_fallback_equals_canonical_values(self):
        result = auto_bands([np.zeros((4, 4), dtype=np.uint8)])
        assert result.bands.outer == (31, 85)
        assert result.bands.middle == (101, 170)
        assert result.bands.central == (171, 255)


class TestKMeans:
    def test_k1_all_background(self, rng):
        img = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
        mask, model = kmeans_segment(img, k=1, seed=0)
        assert np.all(mask.labels == 0)
        assert model.k == 1

    def test_four_value_fixed_point(self):
        values = np.repeat([10, 60, 130, 210], 64).astype(np.uint8)
        img = values.reshape(16, 16)
        mask, model = kmeans_segment(img, k=4, epsilon=0.2, seed=0)
        assert model.centers == (10.0, 60.0, 130.0, 210.0)
        lut = {10: 0, 60: 1, 130: 2, 210: 3}
        expected = np.vectorize(lut.get)(img)
        assert np.array_equal(mask.labels, expected)

    def test_determinism(self, rng):
        img = rng.integers(0, 256, size=(24, 24), dtype=np.uint8)
        m1, _ = kmeans_segment(img, seed=11)
        m2, _ = kmeans_segment(img, seed=11)
        assert np.array_equal(m1.labels, m2.labels)

    def test_inertia_monotone(self, rng):
        for _ in range(10):
            img = rng.integers(0, 256, size=(20, 20), dtype=np.uint8)
            _, model = kmeans_segment(img, seed=int(rng.integers(1e6)))
            trace = np.array(model.inertia_trace)
            assert np.all(np.diff(trace) <= 1e-9)

    def test_too_few_distinct_values(self):
        img = np.full((6, 6), 9, dtype=np.uint8)
        with pytest.raises(DegenerateError):
            kmeans_segment(img, k=4)

    def test_labels_sorted_by_brightness(self, rng):
        img = rng.integers(0, 256, size=(30, 30), dtype=np.uint8)
        mask, model = kmeans_segment(img, seed=5)
        assert list(model.centers) == sorted(model.centers)
        # brightest cluster carries the highest label
        for lab in range(4):
            sel = mask.labels == lab
            if sel.any():
                assert abs(img[sel].mean() - model.centers[lab]) < 80


class TestGmm:
    def test_recovers_separated_gaussians(self):
        rng = np.random.default_rng(99)
        truth_means = (30.0, 90.0, 150.0, 220.0)
        samples = np.concatenate(
            [rng.normal(m, 6.0, size=1000) for m in truth_means]
        )
        img = np.clip(np.rint(samples), 0, 255).astype(np.uint8).reshape(40, 100)
        _, model = gmm_segment(img, components=4, seed=1)
        tol = 3.0 * 6.0 / np.sqrt(1000) + 0.1  # sampling bound plus quantization
        for est, truth in zip(model.means, truth_means):
            assert abs(est - truth) < tol

    def test_single_component_closed_form(self, rng):
        img = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
        _, model = gmm_segment(img, components=1, seed=0)
        pixels = img.astype(np.float64).ravel()
        assert model.means[0] == pytest.approx(pixels.mean(), abs=1e-9)
        assert model.variance == pytest.approx(pixels.var(), rel=1e-9)
        assert model.weights[0] == pytest.approx(1.0)

    def test_log_likelihood_monotone(self, rng):
        for _ in range(10):
            img = rng.integers(0, 256, size=(20, 20), dtype=np.uint8)
            _, model = gmm_segment(img, seed=int(rng.integers(1e6)))
            trace = np.array(model.log_likelihood_trace)
            assert np.all(np.diff(trace) >= -1e-9)

    def test_determinism(self, rng):
        img = rng.integers(0, 256, size=(24, 24), dtype=np.uint8)
        m1, _ = gmm_segment(img, seed=4)
        m2, _ = gmm_segment(img, seed=4)
        assert np.array_equal(m1.labels, m2.labels)

    def test_rejects_other_covariance(self, rng):
        img = rng.integers(0, 256, size=(8, 8), dtype=np.uint8)
        with pytest.raises(ConfigError):
            gmm_segment(img, covariance="full")


def bright_disk(size=64, radius=18.0, hi=200, lo=30):
    rr, cc = np.mgrid[:size, :size]
    disk = (rr - size / 2.0) ** 2 + (cc - size / 2.0) ** 2 <= radius**2
    return np.where(disk, hi, lo).astype(np.uint8), disk


class TestChanVese:
    def test_bright_disk_outer_params(self):
        img, disk = bright_disk()
        run = chanvese_binary(img / 255.0, ChanVeseParams(0.3, 1.0, 1.5, 0.001))
        jac = np.logical_and(run.region, disk).sum() / np.logical_or(run.region, disk).sum()
        assert run.converged
        assert jac >= 0.99

    def test_constant_image_degenerate(self):
        result = chanvese_segment(np.full((32, 32), 77, dtype=np.uint8))
        assert result.degenerate
        assert result.converged
        assert np.all(result.mask.labels == 0)

    def test_composite_precedence_total(self):
        img, _ = bright_disk()
        result = chanvese_segment(img)
        central = result.runs["central"].region
        assert np.all(result.mask.labels[central] == 3)
        middle_only = result.runs["middle"].region & ~central
        assert np.all(result.mask.labels[middle_only] == 2)

    def test_output_contract(self):
        img, _ = bright_disk(size=32, radius=9.0)
        result = chanvese_segment(img)
        assert result.mask.labels.shape == img.shape
        assert set(np.unique(result.mask.labels)) <= {0, 1, 2, 3}

    def test_seed_free_determinism(self):
        img, _ = bright_disk(size=48, radius=12.0)
        r1 = chanvese_segment(img)
        r2 = chanvese_segment(img)
        assert np.array_equal(r1.mask.labels, r2.mask.labels)

    def test_nonconvergence_flagged(self):
        img, _ = bright_disk()
        params = ChanVeseParams(0.3, 1.0, 1.5, tolerance=1e-9, max_iter=5)
        run = chanvese_binary(img / 255.0, params)
        assert not run.converged
        assert run.iterations == 5
