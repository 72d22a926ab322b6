import numpy as np
import pytest

from jetseg.errors import NoFlameError
from jetseg.geometry import (
    contour,
    extract_features,
    flame_region,
    largest_component,
    polygon_area,
)
from jetseg.ingest import Calibration, LabelMask

from jetseg_testutil import random_mask


def flood_fill_components(mask):
    """Brute-force 8-connected component oracle."""
    mask = np.asarray(mask, dtype=bool)
    seen = np.zeros_like(mask)
    comps = []
    for r0, c0 in zip(*np.nonzero(mask)):
        if seen[r0, c0]:
            continue
        stack = [(r0, c0)]
        seen[r0, c0] = True
        pixels = []
        while stack:
            r, c = stack.pop()
            pixels.append((r, c))
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    rr, cc = r + dr, c + dc
                    if (
                        0 <= rr < mask.shape[0]
                        and 0 <= cc < mask.shape[1]
                        and mask[rr, cc]
                        and not seen[rr, cc]
                    ):
                        seen[rr, cc] = True
                        stack.append((rr, cc))
        comps.append(sorted(pixels))
    return comps


class TestFlameRegion:
    def test_all_background(self):
        mask = LabelMask(labels=np.zeros((4, 4), dtype=np.uint8))
        assert not flame_region(mask).any()

    def test_central_only(self):
        labels = np.zeros((4, 4), dtype=np.uint8)
        labels[1:3, 1:3] = 3
        fm = flame_region(LabelMask(labels=labels))
        assert fm.sum() == 4 and fm[1, 1]

    def test_popcount_matches_nonzero_labels(self, rng):
        for _ in range(10):
            mask = random_mask(rng)
            assert flame_region(mask).sum() == np.count_nonzero(mask.labels)


class TestLargestComponent:
    def test_single_blob_identity(self):
        fm = np.zeros((6, 6), dtype=bool)
        fm[1:4, 1:4] = True
        assert np.array_equal(largest_component(fm), fm)

    def test_keeps_big_drops_small(self):
        fm = np.zeros((20, 20), dtype=bool)
        fm[2:12, 2:7] = True  # 50 px
        fm[16:17, 15:18] = True  # 3 px
        out = largest_component(fm)
        assert out.sum() == 50
        assert not out[16, 15]

    def test_empty_raises(self):
        with pytest.raises(NoFlameError):
            largest_component(np.zeros((4, 4), dtype=bool))

    def test_matches_flood_fill_oracle(self, rng):
        for _ in range(20):
            fm = rng.random((15, 15)) < 0.35
            if not fm.any():
                continue
            comps = flood_fill_components(fm)
            sizes = sorted(len(c) for c in comps)
            out = largest_component(fm)
            assert out.sum() == sizes[-1]
            got = sorted(zip(*np.nonzero(out)))
            candidates = [c for c in comps if len(c) == sizes[-1]]
            assert got in [sorted(c) for c in candidates]

    def test_tie_breaks_smallest_topleft(self):
        fm = np.zeros((5, 9), dtype=bool)
        fm[3, 6:8] = True  # later blob, same size
        fm[0, 1:3] = True  # earlier in row-major order
        out = largest_component(fm)
        assert out[0, 1] and out[0, 2] and out.sum() == 2


class TestExtractFeatures:
    def test_rectangle_oracle(self):
        fm = np.zeros((128, 64), dtype=bool)
        fm[20:101, 30:40] = True  # rows 20..100 inclusive, 10 px wide
        cal = Calibration(meters_per_pixel=0.05, nozzle_row=120, nozzle_col=35)
        g = extract_features(fm, cal)
        assert g.height_m == pytest.approx(4.05)
        assert g.liftoff_m == pytest.approx(1.0)
        assert g.area_m2 == pytest.approx(81 * 10 * 0.0025)
        assert g.component_pixel_count == 810
        assert g.tip_px[0] == 20 and g.base_px[0] == 100
        assert not g.liftoff_clamped

    def test_flame_touching_nozzle(self):
        fm = np.zeros((50, 20), dtype=bool)
        fm[10:41, 5:10] = True
        cal = Calibration(meters_per_pixel=0.1, nozzle_row=40, nozzle_col=7)
        g = extract_features(fm, cal)
        assert g.liftoff_m == 0.0
        assert not g.liftoff_clamped

    def test_flame_below_nozzle_clamped(self):
        fm = np.zeros((50, 20), dtype=bool)
        fm[10:45, 5:10] = True
        cal = Calibration(meters_per_pixel=0.1, nozzle_row=40, nozzle_col=7)
        g = extract_features(fm, cal)
        assert g.liftoff_m == 0.0
        assert g.liftoff_clamped

    def test_empty_raises(self):
        cal = Calibration(meters_per_pixel=0.1, nozzle_row=5, nozzle_col=5)
        with pytest.raises(NoFlameError):
            extract_features(np.zeros((10, 10), dtype=bool), cal)

    def test_translation_invariance(self, rng):
        fm = np.zeros((60, 60), dtype=bool)
        fm[10:30, 20:28] = True
        cal = Calibration(meters_per_pixel=0.05, nozzle_row=40, nozzle_col=24)
        g1 = extract_features(fm, cal)
        shifted = np.roll(np.roll(fm, 7, axis=0), 5, axis=1)
        cal2 = Calibration(meters_per_pixel=0.05, nozzle_row=47, nozzle_col=29)
        g2 = extract_features(shifted, cal2)
        assert g1.height_m == g2.height_m
        assert g1.liftoff_m == g2.liftoff_m
        assert g1.area_m2 == g2.area_m2

    def test_scale_covariance(self):
        fm = np.zeros((60, 60), dtype=bool)
        fm[10:30, 20:28] = True
        cal1 = Calibration(meters_per_pixel=0.05, nozzle_row=40, nozzle_col=24)
        cal2 = Calibration(meters_per_pixel=0.10, nozzle_row=40, nozzle_col=24)
        g1 = extract_features(fm, cal1)
        g2 = extract_features(fm, cal2)
        assert g2.height_m == pytest.approx(2 * g1.height_m)
        assert g2.liftoff_m == pytest.approx(2 * g1.liftoff_m)
        assert g2.area_m2 == pytest.approx(4 * g1.area_m2)


class TestContour:
    def test_single_pixel(self):
        fm = np.zeros((5, 5), dtype=bool)
        fm[2, 3] = True
        pts = contour(fm)
        assert pts.tolist() == [[2, 3]]

    def test_filled_square_boundary(self):
        fm = np.zeros((5, 5), dtype=bool)
        fm[1:4, 1:4] = True
        pts = contour(fm)
        unique = {tuple(p) for p in pts.tolist()}
        expected = {(r, c) for r in range(1, 4) for c in range(1, 4)} - {(2, 2)}
        assert unique == expected
        assert len(pts) == 8

    def test_contour_subset_of_component(self, rng):
        for _ in range(15):
            fm = rng.random((12, 12)) < 0.4
            if not fm.any():
                continue
            comp = largest_component(fm)
            pts = contour(fm)
            assert all(comp[r, c] for r, c in pts.tolist())
            assert len({tuple(p) for p in pts.tolist()}) <= comp.sum()

    def test_counter_clockwise_on_screen(self):
        fm = np.zeros((8, 8), dtype=bool)
        fm[2:6, 2:6] = True
        pts = contour(fm)
        assert polygon_area(pts) > 0  # screen-CCW positive by convention

    def test_empty_raises(self):
        with pytest.raises(NoFlameError):
            contour(np.zeros((3, 3), dtype=bool))
