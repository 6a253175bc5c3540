import numpy as np
import pytest
from scipy import stats

from pilotwave import (
    EnsembleFrame,
    Grid,
    Mode,
    WeylWavefunction,
    coarse_grained_H,
    evolve_ensemble,
    h_curve,
    make_zigzag_state,
    sample_density,
)
from pilotwave.dynamics import ZAG, ZIG
from pilotwave.ensembles import (
    WeylEnsembleMover,
    ZigzagEnsembleMover,
    relative_entropy_frames,
    sample_zigzag_frame,
)

from oracle import cell_masses

BOX5 = ([-5.0, -5.0, -5.0], [5.0, 5.0, 5.0])


class TestGrid:
    def test_shape_and_volume(self):
        g = Grid((-5, -5, -5), (5, 5, 5), 0.5)
        assert g.shape == (20, 20, 20)
        assert g.cell_volume == 0.125
        assert g.n_cells == 8000

    def test_non_partitioning_cell_rejected(self):
        with pytest.raises(ValueError, match="partition"):
            Grid((0, 0, 0), (1, 1, 1), 0.3)

    def test_histogram_includes_upper_boundary(self):
        g = Grid((0, 0, 0), (1, 1, 1), 0.5)
        counts = g.histogram(np.array([[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]]))
        assert counts[1, 1, 1] == 1
        assert counts[0, 0, 0] == 1

    def test_average_density_exact_for_linear_fields(self):
        g = Grid((0, 0, 0), (2, 2, 2), 1.0)
        avg = g.average_density(lambda pts: pts[..., 0] + 2 * pts[..., 2])
        centers = g.lo[0] + g.cell * (np.arange(2) + 0.5)
        expected = centers[:, None, None] + 2 * centers[None, None, :]
        np.testing.assert_allclose(avg, np.broadcast_to(expected, (2, 2, 2)),
                                   rtol=1e-13)


class TestSampleDensity:
    def test_uniform_mean_at_box_center(self):
        frame = sample_density(lambda pts: np.ones(pts.shape[:-1]),
                               ([0, 0, 0], [2, 4, 6]), 20000, seed=1)
        center = np.array([1.0, 2.0, 3.0])
        sigma = np.array([2.0, 4.0, 6.0]) / np.sqrt(12.0)
        err = np.abs(frame.positions.mean(axis=0) - center)
        assert np.all(err < 3.0 * sigma / np.sqrt(20000))

    def test_gaussian_covariance_within_three_percent(self):
        sig = 1.2

        def dens(pts):
            return np.exp(-np.sum(pts ** 2, axis=-1) / (2 * sig ** 2))

        frame = sample_density(dens, ([-6, -6, -6], [6, 6, 6]), 100000, seed=2)
        cov = np.cov(frame.positions.T)
        np.testing.assert_allclose(np.diag(cov), sig ** 2, rtol=0.03)
        off = cov - np.diag(np.diag(cov))
        assert np.max(np.abs(off)) < 0.03 * sig ** 2

    def test_three_mode_density_chi_square(self, three_mode_weyl):
        n = 50000
        frame = sample_density(lambda pts: three_mode_weyl.density(0.0, pts),
                               BOX5, n, seed=3)
        grid = Grid(*BOX5, 1.0)
        masses = cell_masses(lambda pts: three_mode_weyl.density(0.0, pts), grid)
        expected = n * masses / masses.sum()
        observed = grid.histogram(frame.positions)
        assert expected.min() > 10
        chi2 = float(np.sum((observed - expected) ** 2 / expected))
        dof = expected.size - 1
        assert stats.chi2.sf(chi2, dof) > 0.01

    def test_reproducible_and_seed_sensitive(self):
        dens = lambda pts: np.ones(pts.shape[:-1])
        a = sample_density(dens, BOX5, 500, seed=11)
        b = sample_density(dens, BOX5, 500, seed=11)
        c = sample_density(dens, BOX5, 500, seed=12)
        np.testing.assert_array_equal(a.positions, b.positions)
        assert not np.array_equal(a.positions, c.positions)

    def test_seed_streams_statistically_equivalent(self):
        dens = lambda pts: np.exp(-np.sum(pts ** 2, axis=-1))
        a = sample_density(dens, BOX5, 3000, seed=21).positions
        b = sample_density(dens, BOX5, 3000, seed=22).positions
        res = stats.permutation_test(
            (a[:, 0], b[:, 0]), lambda x, y: np.mean(x) - np.mean(y),
            n_resamples=500, random_state=0)
        assert res.pvalue > 0.01

    def test_zero_density_rejected(self):
        with pytest.raises(ValueError, match="identically zero"):
            sample_density(lambda pts: np.zeros(pts.shape[:-1]), BOX5, 10, seed=1)

    def test_needle_density_bound_too_loose(self):
        # a spike so narrow that essentially no uniform proposal lands on it
        def dens(pts):
            return np.exp(-1e6 * np.sum(pts ** 2, axis=-1))

        with pytest.raises(ValueError, match="bound too loose"):
            sample_density(dens, BOX5, 50, seed=1)

    def test_needs_at_least_one_sample(self):
        with pytest.raises(ValueError, match="n >= 1"):
            sample_density(lambda pts: np.ones(pts.shape[:-1]), BOX5, 0, seed=1)


class TestSampleZigzagFrame:
    def test_branch_fractions_match_densities(self, heavy_zigzag):
        frame = sample_zigzag_frame(heavy_zigzag, BOX5, 20000, seed=4)
        zag_frac = np.mean(frame.branches == ZAG)
        pts = frame.positions
        psi_l, psi_r = heavy_zigzag.psi_pair(0.0, pts)
        rho_l = np.sum(np.abs(psi_l) ** 2, axis=-1)
        rho_r = np.sum(np.abs(psi_r) ** 2, axis=-1)
        expected = np.mean(rho_r / (rho_l + rho_r))
        assert abs(zag_frac - expected) < 0.01


class _Translate:
    """Test mover: rigid translation at a constant velocity."""

    def __init__(self, v, dt=0.1):
        self.v = np.asarray(v, dtype=float)
        self.dt = dt

    def advance(self, frame, t1, dt=None):
        shift = (t1 - frame.t) * self.v
        return EnsembleFrame(t1, frame.positions + shift, frame.branches,
                             dict(frame.meta))


class TestEvolveEnsemble:
    def test_zero_field_is_identity(self):
        frame = EnsembleFrame(0.0, np.random.default_rng(5).uniform(-1, 1, (50, 3)))
        out = evolve_ensemble(_Translate([0, 0, 0]), frame, 2.0)
        np.testing.assert_array_equal(out.positions, frame.positions)
        assert out.t == 2.0

    def test_single_mode_weyl_translates_rigidly(self):
        wf = WeylWavefunction([Mode((2.0, 1.0, 2.0), 1.0)])
        rng = np.random.default_rng(6)
        frame = EnsembleFrame(0.0, rng.uniform(-2, 2, (200, 3)))
        out = evolve_ensemble(WeylEnsembleMover(wf, dt=0.05), frame, 3.0)
        p_hat = np.array([2.0, 1.0, 2.0]) / 3.0
        np.testing.assert_allclose(out.positions, frame.positions + 3.0 * p_hat,
                                   atol=1e-9)

    def test_all_node_hits_raise(self):
        wf = WeylWavefunction([Mode((0, 0, 1), 0.0)])  # zero amplitude: all nodes
        frame = EnsembleFrame(0.0, np.zeros((10, 3)))
        with pytest.raises(RuntimeError, match="hit nodes"):
            evolve_ensemble(WeylEnsembleMover(wf, dt=0.1), frame, 1.0)


class TestZigzagEnsembleMover:
    def test_eigenstate_ensemble_translates_and_keeps_branches(self):
        state = make_zigzag_state(5.0, [((0.0, 0.0, 2.0), 1.0)])
        rng = np.random.default_rng(7)
        n = 100
        branches = np.array([ZIG, ZAG] * (n // 2))
        frame = EnsembleFrame(0.0, rng.uniform(-1, 1, (n, 3)), branches=branches)
        out = evolve_ensemble(ZigzagEnsembleMover(state, seed=1, dt=0.05), frame, 2.0)
        np.testing.assert_array_equal(out.branches, branches)
        # no jumps for an eigenstate; the zag branch runs luminally along +p
        # while the zig branch (the negative-frequency component) runs along
        # -p, the two averaging to the subluminal drift
        shift = np.where((branches == ZAG)[:, None], [[0, 0, 2.0]], [[0, 0, -2.0]])
        np.testing.assert_allclose(out.positions, frame.positions + shift,
                                   atol=1e-9)
        assert out.meta["jumps"] == 0

    def test_reproducible_per_seed(self, heavy_zigzag):
        frame = sample_zigzag_frame(heavy_zigzag, BOX5, 300, seed=8)
        mover = ZigzagEnsembleMover(heavy_zigzag, seed=8, dt=0.01)
        a = mover.advance(frame, 1.0)
        b = mover.advance(frame, 1.0)
        np.testing.assert_array_equal(a.positions, b.positions)
        np.testing.assert_array_equal(a.branches, b.branches)
        assert a.meta["jumps"] == b.meta["jumps"] > 0

    def test_chained_advances_match_single_advance(self, heavy_zigzag):
        frame = sample_zigzag_frame(heavy_zigzag, BOX5, 200, seed=9)
        mover = ZigzagEnsembleMover(heavy_zigzag, seed=9, dt=0.01)
        direct = mover.advance(frame, 1.0)
        stepped = mover.advance(mover.advance(frame, 0.5), 1.0)
        np.testing.assert_allclose(stepped.positions, direct.positions, atol=1e-12)
        np.testing.assert_array_equal(stepped.branches, direct.branches)

    def test_needs_branch_labels(self, heavy_zigzag):
        frame = EnsembleFrame(0.0, np.zeros((3, 3)))
        with pytest.raises(ValueError, match="branch labels"):
            ZigzagEnsembleMover(heavy_zigzag, seed=1).advance(frame, 1.0)


class TestCoarseGrainedH:
    def test_equilibrium_frame_near_zero(self):
        sig = 1.5

        def dens(t, pts):
            return np.exp(-np.sum(pts ** 2, axis=-1) / (2 * sig ** 2))

        frame = sample_density(lambda pts: dens(0.0, pts), BOX5, 100000, seed=31)
        grid = Grid(*BOX5, 1.0)  # ~100 samples per occupied cell
        h = coarse_grained_H(frame, dens, grid)
        assert abs(h) < 0.01

    def test_half_support_gives_log_two(self):
        rng = np.random.default_rng(32)
        pts = rng.uniform(-5, 0, size=(40000, 1)) * np.array([[1.0, 0, 0]]) \
            + rng.uniform(-5, 5, size=(40000, 3)) * np.array([[0.0, 1, 1]])
        frame = EnsembleFrame(0.0, pts)
        grid = Grid(*BOX5, 2.5)
        h = coarse_grained_H(frame, lambda t, p: np.ones(p.shape[:-1]), grid)
        assert abs(h - np.log(2.0)) < 0.02

    def test_raw_value_is_nonnegative_kl(self):
        frame = sample_density(lambda pts: np.ones(pts.shape[:-1]), BOX5, 2000,
                               seed=33)
        grid = Grid(*BOX5, 2.5)
        raw = coarse_grained_H(frame, lambda t, p: np.ones(p.shape[:-1]), grid,
                               bias_corrected=False)
        assert raw >= 0.0

    def test_positions_outside_grid_rejected(self):
        frame = EnsembleFrame(0.0, np.array([[9.0, 0.0, 0.0]]))
        with pytest.raises(ValueError, match="outside the grid box"):
            coarse_grained_H(frame, lambda t, p: np.ones(p.shape[:-1]),
                             Grid(*BOX5, 2.5))

    def test_support_mismatch_rejected(self):
        frame = EnsembleFrame(0.0, np.array([[-4.0, -4.0, -4.0]] * 5))

        def dens(t, pts):
            return np.where(pts[..., 0] > 0.0, 1.0, 0.0)

        with pytest.raises(ValueError, match="support mismatch"):
            coarse_grained_H(frame, dens, Grid(*BOX5, 2.5))

    def test_translation_relabels_cells_exactly(self):
        rng = np.random.default_rng(34)
        pts = rng.uniform(-5, 5, size=(5000, 3))
        shift = np.array([2.5, 0.0, -2.5])  # a whole number of cells

        def dens(t, p):
            return np.exp(-0.1 * np.sum((p - t * 0.0) ** 2, axis=-1))

        def dens_shifted(t, p):
            return dens(t, p - shift)

        h0 = coarse_grained_H(EnsembleFrame(0.0, pts), dens, Grid(*BOX5, 2.5))
        h1 = coarse_grained_H(
            EnsembleFrame(0.0, pts + shift), dens_shifted,
            Grid(tuple(np.array(BOX5[0]) + shift), tuple(np.array(BOX5[1]) + shift), 2.5))
        assert h0 == pytest.approx(h1, abs=1e-12)


class TestHCurve:
    def test_equilibrium_stays_flat(self, three_mode_weyl):
        dens = lambda t, pts: three_mode_weyl.density(t, pts)
        frame = sample_density(lambda pts: dens(0.0, pts),
                               ([-8, -8, -8], [8, 8, 8]), 60000, seed=35)
        mover = WeylEnsembleMover(three_mode_weyl, dt=0.02)
        inner = Grid((-2, -2, -2), (2, 2, 2), 1.0)

        def restricted(full):
            inside = inner.contains(full.positions)
            return EnsembleFrame(full.t, full.positions[inside])

        values = []
        for ck in (0.0, 1.0, 2.0):
            if ck > frame.t:
                frame = evolve_ensemble(mover, frame, ck)
            values.append(coarse_grained_H(restricted(frame), dens, inner))
        assert np.max(np.abs(values)) < 0.03

    def test_h_curve_constant_under_translation_mover(self):
        rng = np.random.default_rng(36)
        pts = rng.uniform(0, 1, size=(20000, 3))
        frame = EnsembleFrame(0.0, pts)
        v = np.array([1.0, 0.0, 0.0])
        mover = _Translate(v)

        def dens(t, p):
            inside = np.all((p - t * v >= 0.0) & (p - t * v <= 1.0), axis=-1)
            return inside.astype(float)

        def grid_at(t):
            lo = t * v
            return Grid(tuple(lo), tuple(lo + 1.0), 0.25)

        curve = h_curve(mover, frame, grid_at, [1.0, 2.0, 3.0], density=dens)
        values = [h for _, h in curve]
        assert np.max(np.abs(np.diff(values))) < 1e-12

    def test_checkpoints_must_increase(self, three_mode_weyl):
        frame = EnsembleFrame(0.0, np.zeros((5, 3)))
        mover = WeylEnsembleMover(three_mode_weyl)
        with pytest.raises(ValueError, match="increasing"):
            h_curve(mover, frame, Grid(*BOX5, 2.5), [2.0, 1.0])


class TestRelativeEntropyFrames:
    def test_same_density_near_zero(self):
        dens = lambda pts: np.exp(-0.5 * np.sum(pts ** 2, axis=-1))
        a = sample_density(dens, BOX5, 20000, seed=37)
        b = sample_density(dens, BOX5, 80000, seed=38)
        h = relative_entropy_frames(a, b, Grid(*BOX5, 2.5))
        assert abs(h) < 0.02

    def test_concentrated_cloud_vs_uniform_reference(self):
        rng = np.random.default_rng(39)
        a = EnsembleFrame(0.0, rng.uniform(-5, 0, size=(20000, 3)))
        b = EnsembleFrame(0.0, rng.uniform(-5, 5, size=(80000, 3)))
        h = relative_entropy_frames(a, b, Grid(*BOX5, 2.5))
        assert abs(h - np.log(8.0)) < 0.05
