import numpy as np
import pytest
from hypothesis import given, strategies as st

from mwbeam.geometry import (
    ArrayGeometry,
    ImagingGrid,
    Region,
    delay_monostatic,
    delay_multistatic,
    ring_array,
)


def simple_pair(v=3e8, dt=1e-10):
    ants = np.array([[0.1, 0.0, 0.0], [-0.1, 0.0, 0.0]])
    return ArrayGeometry(ants, v, dt)


class TestDelays:
    def test_monostatic_zero_at_antenna(self):
        geom = simple_pair()
        assert delay_monostatic(geom, 0, (0.1, 0.0)) == 0.0

    def test_monostatic_hand_value(self):
        # |r - a| = 0.03 m, v = 3e8, dt = 1e-10 -> 0.03 / (2 * 3e8 * 1e-10) = 0.5
        geom = ArrayGeometry(
            np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]), 3e8, 1e-10
        )
        assert delay_monostatic(geom, 0, (0.03, 0.0)) == pytest.approx(0.5, rel=1e-12)

    def test_monostatic_scales_inversely_with_dt(self):
        r = (0.02, -0.013)
        a = delay_monostatic(simple_pair(dt=1e-10), 0, r)
        b = delay_monostatic(simple_pair(dt=2e-10), 0, r)
        assert a == pytest.approx(2.0 * b, rel=1e-12)

    def test_multistatic_hand_value(self):
        v, dt = 2.99792458e8, 1e-10
        geom = simple_pair(v, dt)
        got = delay_multistatic(geom, 0, 1, (0.0, 0.0))
        assert got == pytest.approx(0.2 / (v * dt), rel=1e-12)
        assert got == pytest.approx(6.6713, rel=1e-4)

    def test_multistatic_symmetric_in_tx_rx(self):
        geom = simple_pair()
        rng = np.random.default_rng(7)
        for _ in range(20):
            r = rng.uniform(-0.1, 0.1, 2)
            assert delay_multistatic(geom, 0, 1, r) == delay_multistatic(geom, 1, 0, r)

    def test_multistatic_zero_when_point_at_shared_antenna(self):
        geom = simple_pair()
        assert delay_multistatic(geom, 0, 0, (0.1, 0.0)) == 0.0

    def test_diagonal_is_four_times_monostatic(self):
        # mono = d / (2 v dt), multi(i, i) = 2 d / (v dt) -> exact factor 4
        geom = simple_pair()
        rng = np.random.default_rng(3)
        for _ in range(30):
            r = rng.uniform(-0.2, 0.2, 2)
            for i in range(2):
                assert delay_multistatic(geom, i, i, r) == pytest.approx(
                    4.0 * delay_monostatic(geom, i, r), rel=1e-12
                )

    def test_translation_invariance(self):
        rng = np.random.default_rng(11)
        base = rng.uniform(-0.1, 0.1, (3, 3))
        base[:, 2] = 0.0
        for _ in range(10):
            shift = rng.uniform(-1, 1, 2)
            moved = base.copy()
            moved[:, 0] += shift[0]
            moved[:, 1] += shift[1]
            g0 = ArrayGeometry(base, 3e8, 1e-10)
            g1 = ArrayGeometry(moved, 3e8, 1e-10)
            r = rng.uniform(-0.05, 0.05, 2)
            r1 = r + shift
            assert delay_multistatic(g0, 0, 2, r) == pytest.approx(
                delay_multistatic(g1, 0, 2, r1), rel=1e-9
            )
            assert delay_monostatic(g0, 1, r) == pytest.approx(
                delay_monostatic(g1, 1, r1), rel=1e-9
            )


class TestRingArray:
    def test_four_antennas_on_axes(self):
        geom = ring_array(4, 1.0)
        expect = np.array(
            [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float
        )
        assert np.allclose(geom.antennas, expect, atol=1e-15)

    def test_twelve_antennas_30_degree_gaps(self):
        geom = ring_array(12, 0.1)
        ang = np.arctan2(geom.antennas[:, 1], geom.antennas[:, 0])
        gaps = np.diff(np.unwrap(ang))
        assert np.allclose(np.degrees(gaps), 30.0, atol=1e-9)

    def test_all_on_circle(self):
        for n in (2, 5, 12, 37):
            geom = ring_array(n, 0.37, center=(0.2, -0.1))
            d = np.hypot(geom.antennas[:, 0] - 0.2, geom.antennas[:, 1] + 0.1)
            assert np.allclose(d, 0.37, rtol=1e-12)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            ring_array(1, 1.0)
        with pytest.raises(ValueError):
            ring_array(4, 0.0)


class TestArrayGeometryValidation:
    def test_needs_two_antennas(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.zeros((1, 3)))

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.array([[0.0, 0, 0], [0.0, 0, 0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ArrayGeometry(np.array([[0.0, 0, 0], [np.inf, 0, 0]]))

    def test_rejects_bad_scalars(self):
        ants = np.array([[0.0, 0, 0], [1.0, 0, 0]])
        with pytest.raises(ValueError):
            ArrayGeometry(ants, propagation_speed=0.0)
        with pytest.raises(ValueError):
            ArrayGeometry(ants, sample_interval=-1e-11)


class TestImagingGrid:
    def test_cell_center_round_trip(self):
        grid = ImagingGrid(origin=(-0.1, -0.05), extent=(0.2, 0.1), resolution=1e-3)
        assert grid.dims == (200, 100)
        rng = np.random.default_rng(5)
        for _ in range(50):
            ix = int(rng.integers(0, 200))
            iy = int(rng.integers(0, 100))
            x, y = grid.cell_center(ix, iy)
            assert grid.point_to_cell(x, y) == (ix, iy)

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            ImagingGrid((0, 0), (1, 1), 0.0)


class TestRegion:
    @given(
        x0=st.integers(0, 30),
        y0=st.integers(0, 30),
        w=st.integers(2, 41),
        h=st.integers(2, 41),
    )
    def test_quadrants_partition_exactly(self, x0, y0, w, h):
        reg = Region((x0, y0), (x0 + w - 1, y0 + h - 1))
        quads = reg.quadrants()
        assert quads is not None and len(quads) == 4
        assert sum(q.n_cells for q in quads) == reg.n_cells
        seen = set()
        for q in quads:
            assert reg.contains_region(q)
            cells = {
                (i, j)
                for i in range(q.min_cell[0], q.max_cell[0] + 1)
                for j in range(q.min_cell[1], q.max_cell[1] + 1)
            }
            assert not (seen & cells)
            seen |= cells
        assert len(seen) == reg.n_cells

    def test_odd_split_favors_low_half(self):
        quads = Region((0, 0), (4, 4)).quadrants()
        assert quads[0] == Region((0, 0), (2, 2))
        assert quads[3] == Region((3, 3), (4, 4))

    def test_too_small_to_subdivide(self):
        assert Region((0, 0), (0, 5)).quadrants() is None
        assert Region((2, 2), (9, 2)).quadrants() is None

    def test_expand_clips_to_parent(self):
        parent = Region((0, 0), (99, 99))
        reg = Region((0, 0), (49, 49))
        grown = reg.expand(0.25, parent)
        assert grown == Region((0, 0), (62, 62))  # ceil(0.25 * 50) = 13

    def test_intersection(self):
        a = Region((0, 0), (10, 10))
        b = Region((5, 5), (20, 20))
        assert a.intersection(b) == Region((5, 5), (10, 10))
        assert a.intersection(Region((11, 11), (12, 12))) is None

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            Region((5, 0), (0, 0))

    def test_dict_round_trip(self):
        reg = Region((1, 2), (3, 4))
        assert Region.from_dict(reg.to_dict()) == reg
