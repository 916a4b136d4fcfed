import numpy as np
import pytest

from chartline.errors import ContractViolation, GenerationError
from chartline.rasterize import StrokeStyle
from chartline.synthgen import (
    ChartSpec,
    generate_sample,
    generate_series,
    generate_spec,
    plot_area_for,
)


def sampled_gap(a, b):
    lo = max(a.xs[0], b.xs[0])
    hi = min(a.xs[-1], b.xs[-1])
    grid = np.arange(np.ceil(lo), np.floor(hi) + 1)
    return np.interp(grid, a.xs, a.ys) - np.interp(grid, b.xs, b.ys)


class TestGenerateSpec:
    def test_deterministic(self):
        assert generate_spec(42, "hard") == generate_spec(42, "hard")

    def test_easy_profile_shape(self):
        for seed in range(20):
            spec = generate_spec(seed, "easy")
            assert spec.pattern == "easy"
            assert spec.color_policy == "distinct"
            assert spec.n_lines <= 3

    def test_hard_profile_covers_all_three_patterns(self):
        seen = {generate_spec(seed, "hard").pattern for seed in range(1000)}
        assert {"crossing", "occlusion", "crowding"} <= seen

    def test_unknown_profile_rejected(self):
        with pytest.raises(ContractViolation):
            generate_spec(0, "nightmare")


class TestGenerateSeries:
    def test_crossing_has_sign_change(self):
        for seed in range(15):
            spec = generate_spec(seed, "mixed")
            if spec.pattern != "crossing":
                continue
            series = generate_series(spec)
            found = False
            for i in range(len(series)):
                for j in range(i + 1, len(series)):
                    d = sampled_gap(series[i], series[j])
                    if len(d) and d.min() < 0 < d.max():
                        found = True
            assert found

    def test_easy_min_gap_exceeds_three_thicknesses(self):
        for seed in range(15):
            spec = generate_spec(seed, "easy")
            if spec.n_lines < 2:
                continue
            series = generate_series(spec)
            t = max(s.thickness for s in spec.styles)
            for i in range(len(series)):
                for j in range(i + 1, len(series)):
                    assert np.abs(sampled_gap(series[i], series[j])).min() > 3 * t

    def test_occlusion_masks_share_a_long_run(self):
        from chartline.rasterize import render_line_mask

        spec = generate_spec(3, "hard")
        while spec.pattern != "occlusion":
            spec = generate_spec(spec.seed + 1, "hard")
        series = generate_series(spec)
        masks = [render_line_mask(s, spec.width, spec.height, 3) for s in series]
        best = 0
        for i in range(len(masks)):
            for j in range(i + 1, len(masks)):
                both = np.logical_and(masks[i].bits, masks[j].bits).any(axis=0)
                run = cur = 0
                for v in both:
                    cur = cur + 1 if v else 0
                    run = max(run, cur)
                best = max(best, run)
        assert best >= 0.1 * spec.width

    def test_crowding_stays_tight(self):
        spec = generate_spec(8, "hard")
        while spec.pattern != "crowding":
            spec = generate_spec(spec.seed + 1, "hard")
        series = generate_series(spec)
        box = plot_area_for(spec)
        for i in range(len(series)):
            for j in range(i + 1, len(series)):
                assert np.abs(sampled_gap(series[i], series[j])).mean() < 0.05 * box.height

    def test_series_satisfy_invariants(self):
        for seed in range(25):
            spec = generate_spec(seed, "mixed")
            box = plot_area_for(spec)
            for s in generate_series(spec):
                assert np.all(np.diff(s.xs) > 0)
                assert len(s) >= 2
                for x, y in s:
                    assert box.contains(x, y, slack=0.5)

    def test_infeasible_easy_layout_errors(self):
        styles = tuple(StrokeStyle(color=(0, 0, i)) for i in range(10))
        spec = ChartSpec(seed=1, width=120, height=80, n_lines=10, pattern="easy",
                         styles=styles, n_points=5)
        with pytest.raises(GenerationError):
            generate_series(spec)


class TestDeterminism:
    def test_sample_byte_equality(self):
        for profile in ("easy", "hard", "mixed"):
            a = generate_sample(99, profile)
            b = generate_sample(99, profile)
            assert np.array_equal(a.image.pixels, b.image.pixels)
            assert a.gt_series == b.gt_series
            assert a.metadata == b.metadata
            assert a.plot_area == b.plot_area

    def test_different_seeds_differ(self):
        a = generate_sample(1, "mixed")
        b = generate_sample(2, "mixed")
        assert not np.array_equal(a.image.pixels, b.image.pixels)
