import numpy as np
import pytest

from chartline.core import AxisCalibration, LineMask, PointSeries, interpolate_at
from chartline.errors import CalibrationError, ContractViolation, RejectedMaskError
from chartline.extract import (
    ExtractionConfig,
    extract_series,
    scale_to_data,
    suppress_duplicates,
    x_range,
)
from chartline.evaluate import evaluate_chart
from chartline.rasterize import render_line_mask
from chartline.synthgen import generate_sample


def mask_from_bits(bits) -> LineMask:
    bits = np.asarray(bits, dtype=bool)
    return LineMask(bits.shape[1], bits.shape[0], bits)


class TestXRange:
    def test_columns_with_foreground(self):
        bits = np.zeros((5, 20), dtype=bool)
        bits[2, 3:18] = True
        assert x_range(mask_from_bits(bits)) == (3, 17)

    def test_empty_mask(self):
        assert x_range(LineMask.empty(10, 10)) is None

    def test_full_width_line(self):
        bits = np.zeros((5, 100), dtype=bool)
        bits[1, :] = True
        assert x_range(mask_from_bits(bits)) == (0, 99)


class TestExtractSeries:
    def test_thick_horizontal_line_means_to_center(self):
        bits = np.zeros((10, 10), dtype=bool)
        bits[4:7, :] = True
        s = extract_series(mask_from_bits(bits))
        assert s.points() == [(float(x), 5.0) for x in range(10)]

    def test_thin_diagonal_one_pixel_per_column(self):
        bits = np.zeros((5, 5), dtype=bool)
        for x, y in [(0, 0), (1, 1), (2, 2), (3, 3)]:
            bits[y, x] = True
        s = extract_series(mask_from_bits(bits), ExtractionConfig(min_mask_pixels=1))
        assert s.points() == [(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]

    def test_gap_columns_filled_by_interpolation(self):
        bits = np.zeros((10, 12), dtype=bool)
        bits[4:7, :] = True
        bits[:, 4:7] = False  # erase columns 4..6
        s = extract_series(mask_from_bits(bits))
        for x in (4, 5, 6):
            assert interpolate_at(s, x) == pytest.approx(5.0)

    def test_too_few_pixels_rejected(self):
        bits = np.zeros((5, 5), dtype=bool)
        bits[0, 0:3] = True
        with pytest.raises(RejectedMaskError):
            extract_series(mask_from_bits(bits))

    def test_delta_x_steps_and_always_includes_end(self):
        bits = np.zeros((4, 11), dtype=bool)
        bits[2, :] = True
        s = extract_series(mask_from_bits(bits), ExtractionConfig(delta_x=4, min_mask_pixels=1))
        assert [x for x, _ in s] == [0.0, 4.0, 8.0, 10.0]

    def test_branch_columns_follow_previous_sample(self):
        # two horizontal branches far apart; start anchored on the top one
        bits = np.zeros((30, 10), dtype=bool)
        bits[3, :] = True
        bits[25, 5:] = True
        s = extract_series(mask_from_bits(bits), ExtractionConfig(min_mask_pixels=1))
        assert all(y == 3.0 for _, y in s)

    def test_output_x_strictly_increasing_within_range(self):
        sample = generate_sample(6, "mixed")
        for gt in sample.gt_series:
            m = render_line_mask(gt, sample.image.width, sample.image.height, 3)
            s = extract_series(m)
            assert np.all(np.diff(s.xs) > 0)
            lo, hi = x_range(m)
            assert s.xs[0] >= lo and s.xs[-1] <= hi

    def test_round_trip_error_bound_for_gentle_slopes(self, rng):
        t = 3
        for _ in range(25):
            xs = np.arange(0, 61, 10, dtype=float)
            ys = [float(rng.uniform(20, 60))]
            for _ in range(len(xs) - 1):
                ys.append(float(np.clip(ys[-1] + rng.uniform(-10, 10), 15, 65)))
            gt = PointSeries(list(zip(xs, ys)))  # |slope| <= 1 by construction
            m = render_line_mask(gt, 80, 80, t)
            pred = extract_series(m)
            for x, y in gt:
                y_hat = interpolate_at(pred, x)
                assert y_hat is not None
                assert abs(y_hat - y) <= (t - 1) / 2 + 0.5

    def test_smaller_delta_x_never_scores_worse(self):
        for seed in (1, 5, 9):
            sample = generate_sample(seed, "mixed")
            w, h = sample.image.width, sample.image.height
            masks = [render_line_mask(s, w, h, 3) for s in sample.gt_series]
            scores = []
            for dx in (8, 4, 2, 1):
                preds = [extract_series(m, ExtractionConfig(delta_x=dx)) for m in masks]
                r = evaluate_chart(preds, sample.gt_series, sample.plot_area, "6a")
                scores.append(r.score)
            # monotone up to sub-pixel rasterization noise: coarse sampling can
            # accidentally smooth pixel jitter and win by well under a pixel
            noise = 0.5 / sample.plot_area.height
            assert all(b >= a - noise for a, b in zip(scores, scores[1:]))


class TestSuppressDuplicates:
    def test_exact_copy_dropped(self):
        bits = np.zeros((8, 8), dtype=bool)
        bits[2, :] = True
        a = LineMask(8, 8, bits, confidence=1.0)
        b = LineMask(8, 8, bits.copy(), confidence=0.9)
        assert suppress_duplicates([a, b]) == [a]

    def test_disjoint_masks_kept(self):
        a = mask_from_bits(np.eye(8))
        b = mask_from_bits(np.flipud(np.eye(8)))
        kept = suppress_duplicates([a, b])
        assert len(kept) == 2

    def test_near_duplicate_among_five(self):
        # five predictions, two near-duplicates of the same line
        w = h = 100
        masks = [
            render_line_mask(PointSeries([(5, 15 + 20 * i), (95, 15 + 20 * i)]), w, h, 3)
            for i in range(4)
        ]
        dup = LineMask(w, h, masks[0].bits.copy(), confidence=0.9)
        # perturb a few pixels so IoU ~0.9, not 1.0
        cols = np.flatnonzero(dup.bits.any(axis=0))[:3]
        bits = dup.bits.copy()
        bits[:, cols] = False
        dup = LineMask(w, h, bits, confidence=0.9)
        from chartline.core import mask_iou

        assert mask_iou(dup, masks[0]) >= 0.75
        kept = suppress_duplicates(masks + [dup])
        assert len(kept) == 4

    def test_order_by_confidence_then_size(self):
        big = np.zeros((8, 8), dtype=bool)
        big[0:2, :] = True
        small = np.zeros((8, 8), dtype=bool)
        small[5, :] = True
        a = LineMask(8, 8, small, confidence=0.5)
        b = LineMask(8, 8, big, confidence=0.5)
        kept = suppress_duplicates([a, b])
        assert kept == [b, a]  # bigger first on equal confidence

    def test_idempotent(self, rng):
        from conftest import random_mask

        masks = [random_mask(rng, 12, 12, 0.2, confidence=float(c))
                 for c in rng.random(6)]
        once = suppress_duplicates(masks)
        assert suppress_duplicates(once) == once

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ContractViolation):
            suppress_duplicates([LineMask.empty(3, 3), LineMask.empty(4, 3)])


class TestScaleToData:
    CAL = AxisCalibration(x_refs=((0, 0), (100, 10)), y_refs=((200, 0), (100, 1)))

    def test_linear_x_midpoint(self):
        out = scale_to_data(PointSeries([(0, 200), (50, 200)]), self.CAL)
        assert out[1][0] == pytest.approx(5.0)

    def test_y_two_point_affine(self):
        out = scale_to_data(PointSeries([(0, 150), (50, 150)]), self.CAL)
        assert out[0][1] == pytest.approx(0.5)

    def test_identity_references_pass_values_through(self):
        cal = AxisCalibration(x_refs=((0, 0), (1, 1)), y_refs=((0, 0), (1, 1)))
        out = scale_to_data(PointSeries([(3, 7), (4, 8)]), cal)
        assert out == [(3.0, 7.0), (4.0, 8.0)]

    def test_degenerate_calibration_rejected(self):
        with pytest.raises(Exception):
            AxisCalibration(x_refs=((5, 0), (5, 1)), y_refs=((0, 0), (1, 1)))

    def test_missing_calibration_rejected(self):
        with pytest.raises(CalibrationError):
            scale_to_data(PointSeries([(0, 0), (1, 1)]), None)
