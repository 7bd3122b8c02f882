import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mwbeam.beamform import EVAL_COUNTER, BeamformerKind, EnergyMap, image
from mwbeam.coarse2fine import (
    Automatic,
    FrameworkConfig,
    Manual,
    auto_decimation_factor,
    breast_mask,
    class_distances,
    consistency_check,
    decision_metric,
    run_framework,
    select_roi,
)
from mwbeam.geometry import ImagingGrid, ring_array
from mwbeam.presets import grid_for_geometry
from mwbeam.simulate import Phantom, simulate


def sim_ds(radius=0.05, tumor=(0.01, -0.005), n_ant=8, n=256, **kw):
    phantom = Phantom(radius=radius, tumor_center=tumor)
    geom = ring_array(n_ant, radius, sample_interval=1e-11)
    return phantom, simulate(phantom, geom, n_samples=n, **kw)


class TestAutoFactor:
    def test_one_cm_tumor_at_one_mm(self):
        assert auto_decimation_factor(0.01, 0.001) == 7

    def test_never_below_one(self):
        assert auto_decimation_factor(0.001, 0.001) == 1

    def test_two_cm_tumor(self):
        assert auto_decimation_factor(0.02, 0.001) == 14

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            auto_decimation_factor(0.0, 0.001)


class TestDecisionMetric:
    def test_equal_variances_return_mean(self):
        # values {1, 3}: mean 2, var 1; sigma_prev = 1 -> Delta = 0 -> mean
        assert decision_metric([1.0, 3.0], 1.0) == 2.0

    def test_zero_prev_variance_returns_variance(self):
        # values {0, 4}: mean 2, var 4; sigma_prev = 0 -> Delta = 1 -> var
        assert decision_metric([0.0, 4.0], 0.0) == 4.0

    def test_hand_blend(self):
        # mean 2, var 4, sigma_prev 2 -> Delta 0.5 -> 0.5*2 + 0.5*4 = 3
        assert decision_metric([0.0, 4.0], 2.0) == 3.0

    def test_zero_variance_falls_back_to_mean(self):
        assert decision_metric([5.0, 5.0, 5.0], 3.0) == 5.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            decision_metric([], 1.0)

    @settings(max_examples=200)
    @given(
        vals=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=12),
        prev=st.floats(0, 1e9),
    )
    def test_stays_between_mean_and_variance(self, vals, prev):
        arr = np.asarray(vals)
        mu, var = float(arr.mean()), float(arr.var())
        out = decision_metric(vals, prev)
        lo, hi = min(mu, var), max(mu, var)
        span = max(abs(lo), abs(hi), 1.0)
        assert lo - 1e-9 * span <= out <= hi + 1e-9 * span


class TestClassDistances:
    def test_identical_constant_classes(self):
        assert class_distances([5.0, 5.0], [5.0, 5.0]) == (0.0, 0.0)

    def test_hand_example(self):
        w, b = class_distances([1.0, 3.0], [2.0, 6.0])
        assert w == 10.0
        assert b == 4.0

    def test_swap_invariance(self):
        w1, b1 = class_distances([1.0, 3.0, 7.0], [2.0, 6.0])
        w2, b2 = class_distances([2.0, 6.0], [1.0, 3.0, 7.0])
        assert w1 == w2
        assert b1 == pytest.approx(b2, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            class_distances([], [1.0])


def lattice_map(grid, stride, values):
    """EnergyMap on the full stride lattice with an override dict."""
    nx, ny = grid.dims
    entries = {}
    for ix in range(0, nx, stride):
        for iy in range(0, ny, stride):
            entries[(ix, iy)] = values.get((ix, iy), 0.0)
    return EnergyMap(grid, entries, stride)


class TestSelectRoi:
    def grid(self, n=64, res=0.001):
        return ImagingGrid((0, 0), (n * res, n * res), res)

    def test_single_dominant_point_always_kept(self):
        grid = self.grid()
        region = grid.full_region()
        for cell in [(14, 14), (2, 60), (33, 31)]:
            emap = lattice_map(grid, 2, {cell: 5.0})
            for cfg in (FrameworkConfig(), FrameworkConfig(frame_fraction=0.1, n_min=6)):
                final, trace = select_roi(emap, region, cfg)
                assert final.contains_cell(*cell), (cell, cfg, final)

    def test_degenerate_map_returns_whole_region_with_warning(self):
        grid = self.grid()
        emap = lattice_map(grid, 2, {})
        final, trace = select_roi(emap, grid.full_region())
        assert final == grid.full_region()
        assert trace.warning is not None
        assert trace.termination == "degenerate"

    def test_empty_map_rejected(self):
        grid = self.grid()
        with pytest.raises(ValueError):
            select_roi(EnergyMap(grid, {}), grid.full_region())

    def test_selection_chain_is_monotone(self):
        phantom, ds = sim_ds()
        grid = grid_for_geometry(ds.geometry, 0.001)
        coarse = image(ds, BeamformerKind.DAS, grid, stride=7, mask=breast_mask(grid))
        final, trace = select_roi(coarse, grid.full_region())
        parent = grid.full_region()
        for rec in trace.records:
            assert parent.contains_region(rec.selected_region)
            assert parent.contains_region(rec.expanded_region)
            if rec.satisfied:
                parent = rec.expanded_region
        assert trace.records, "expected at least one iteration"

    def test_trace_carries_metric_stats(self):
        phantom, ds = sim_ds()
        grid = grid_for_geometry(ds.geometry, 0.001)
        coarse = image(ds, BeamformerKind.DAS, grid, stride=7, mask=breast_mask(grid))
        _, trace = select_roi(coarse, grid.full_region())
        later = [r for r in trace.records if r.iteration > 1]
        assert later
        for rec in later:
            for s in rec.stats:
                if s is not None:
                    assert {"mu", "var", "delta", "delta_raw", "clamped"} <= set(s)
        assert trace.termination in {"distance-metrics", "n-min", "region-floor"}

    def test_boundary_tumor_stays_inside_expanded_selection(self):
        # tumor center on the vertical cut line of the first subdivision
        phantom, ds = sim_ds(tumor=(0.0, -0.013))
        grid = grid_for_geometry(ds.geometry, 0.001)
        mask = breast_mask(grid)
        coarse = image(ds, BeamformerKind.DAS, grid, stride=7, mask=mask)
        final, _ = select_roi(coarse, grid.full_region(), FrameworkConfig(frame_fraction=0.25))
        truth = image(ds, BeamformerKind.DAS, grid, mask=mask).argmax_cell()
        assert final.contains_cell(*truth)
        assert final.contains_cell(*grid.point_to_cell(*phantom.tumor_center))


class TestRunFramework:
    def test_manual_one_equals_classical_image(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.004)
        mask = breast_mask(grid)
        classical = image(ds, BeamformerKind.DAS, grid, mask=mask)
        composite, report = run_framework(ds, BeamformerKind.DAS, grid, Manual(1))
        assert composite.entries == classical.entries
        assert report.reduction_ratio == 1.0
        assert report.fine_points_evaluated == 0

    def test_point_accounting_matches_counter(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.002)
        before = EVAL_COUNTER.value
        _, report = run_framework(ds, BeamformerKind.DAS, grid, Manual(3))
        assert (
            EVAL_COUNTER.value - before
            == report.coarse_points_evaluated + report.fine_points_evaluated
        )

    def test_composite_preserves_coarse_values(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.002)
        mask = breast_mask(grid)
        composite, report = run_framework(ds, BeamformerKind.DAS, grid, Manual(3))
        direct = image(ds, BeamformerKind.DAS, grid, stride=3, mask=mask)
        for cell, val in direct.entries.items():
            assert composite.entries[cell] == val

    def test_composite_argmax_matches_full_image(self):
        phantom, ds = sim_ds()
        grid = grid_for_geometry(ds.geometry, 0.002)
        mask = breast_mask(grid)
        composite, report = run_framework(
            ds, BeamformerKind.DAS, grid, Automatic(0.01)
        )
        full = image(ds, BeamformerKind.DAS, grid, mask=mask)
        assert composite.argmax_cell() == full.argmax_cell()

    def test_auto_mode_uses_derived_factor(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.002)
        _, report = run_framework(ds, BeamformerKind.DAS, grid, Automatic(0.01))
        assert report.decimation_factor == 3  # floor((0.01 / sqrt 2) / 0.002)

    def test_report_serializes(self):
        import json

        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.004)
        _, report = run_framework(ds, BeamformerKind.DAS, grid, Manual(2))
        payload = json.dumps(report.to_dict())
        assert "reduction_ratio" in payload


class TestConsistencyCheck:
    def test_equal_factors_rejected(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.001)
        with pytest.raises(ValueError):
            consistency_check(ds, BeamformerKind.DAS, grid, 5, 5)

    def test_factor_out_of_range_rejected(self):
        phantom, ds = sim_ds(n_ant=5, n=128)
        grid = grid_for_geometry(ds.geometry, 0.001)
        with pytest.raises(ValueError, match="acceptable range"):
            consistency_check(ds, BeamformerKind.DAS, grid, 5, 9)  # auto limit is 7

    def test_clean_tumor_confirms(self):
        phantom, ds = sim_ds()
        grid = grid_for_geometry(ds.geometry, 0.001)
        verdict, rep_a, rep_b = consistency_check(ds, BeamformerKind.DAS, grid, 5, 7)
        assert verdict.confirmed
        assert verdict.overlap is not None
        truth = grid.point_to_cell(*phantom.tumor_center)
        assert rep_a.final_region.contains_cell(*truth)
        assert rep_b.final_region.contains_cell(*truth)


class TestBreastMask:
    def test_corners_excluded_center_included(self):
        grid = ImagingGrid((-0.05, -0.05), (0.1, 0.1), 0.001)
        mask = breast_mask(grid)
        assert mask[50, 50]
        assert not mask[0, 0]
        assert not mask[99, 99]
        # circle area within ~2 % of pi r^2 at this resolution
        assert mask.sum() == pytest.approx(np.pi * 50**2, rel=0.02)
