import numpy as np
import pytest

from pilotwave import (
    Mode,
    antisymmetrize,
    product_pair,
    speed_defect,
    two_weyl_velocities,
    weyl_velocity,
)


class _FixedAmplitude:
    """Stub pair wavefunction returning a constant spin array."""

    def __init__(self, psi):
        self.psi = np.asarray(psi, dtype=complex)

    def __call__(self, t, x1, x2):
        return self.psi


MODE_A = Mode((0.0, 0.0, 1.0), 1.0)
MODE_B = Mode((1.0, 0.0, 0.0), 1.0)


class TestProductStates:
    def test_velocities_factorize(self):
        wf = product_pair(MODE_A, MODE_B)
        rng = np.random.default_rng(40)
        for _ in range(20):
            t = rng.uniform(0, 3)
            x1, x2 = rng.normal(size=3), rng.normal(size=3)
            v1, v2 = two_weyl_velocities(wf, t, x1, x2)
            from pilotwave import helicity_spinor
            np.testing.assert_allclose(
                v1, weyl_velocity(helicity_spinor([0, 0, 1], "R"), "R"), atol=1e-12)
            np.testing.assert_allclose(
                v2, weyl_velocity(helicity_spinor([1, 0, 0], "R"), "R"), atol=1e-12)

    def test_both_luminal_and_zero_defect(self):
        wf = product_pair(MODE_A, MODE_B)
        rng = np.random.default_rng(41)
        for _ in range(50):
            t = rng.uniform(0, 3)
            x1, x2 = rng.normal(size=3), rng.normal(size=3)
            v1, v2 = two_weyl_velocities(wf, t, x1, x2)
            assert abs(np.linalg.norm(v1) - 1.0) < 1e-12
            assert abs(np.linalg.norm(v2) - 1.0) < 1e-12
            assert abs(speed_defect(wf, t, x1, x2)) < 1e-12


class TestSpeedDefectIdentity:
    def test_closed_form_matches_direct_contraction(self):
        rng = np.random.default_rng(42)
        for _ in range(10000):
            psi = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            wf = _FixedAmplitude(psi)
            v1, v2 = two_weyl_velocities(wf, 0.0, np.zeros(3), np.zeros(3))
            defect = speed_defect(wf, 0.0, np.zeros(3), np.zeros(3))
            assert abs(defect - (1.0 - v1 @ v1)) < 1e-10
            # the defect is shared by both particles
            assert abs((1.0 - v1 @ v1) - (1.0 - v2 @ v2)) < 1e-10

    def test_diagonal_bell_amplitude_freezes_particle(self):
        psi = np.array([[1.0, 0.0], [0.0, 1.0]]) / np.sqrt(2.0)
        wf = _FixedAmplitude(psi)
        v1, v2 = two_weyl_velocities(wf, 0.0, np.zeros(3), np.zeros(3))
        assert speed_defect(wf, 0.0, np.zeros(3), np.zeros(3)) == pytest.approx(1.0)
        np.testing.assert_allclose(v1, 0.0, atol=1e-15)
        np.testing.assert_allclose(v2, 0.0, atol=1e-15)

    def test_symmetric_amplitude_equal_velocities_at_coincidence(self):
        rng = np.random.default_rng(43)
        sym = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        sym = sym + sym.T
        wf = _FixedAmplitude(sym)
        x = np.array([0.3, -0.1, 0.9])
        v1, v2 = two_weyl_velocities(wf, 0.0, x, x)
        np.testing.assert_allclose(v1, v2, atol=1e-14)

    def test_zero_density_rejected(self):
        wf = _FixedAmplitude(np.zeros((2, 2)))
        with pytest.raises(ValueError, match="density"):
            two_weyl_velocities(wf, 0.0, np.zeros(3), np.zeros(3))
        with pytest.raises(ValueError, match="density"):
            speed_defect(wf, 0.0, np.zeros(3), np.zeros(3))


class TestAntisymmetrize:
    def test_identical_modes_rejected(self):
        with pytest.raises(ValueError, match="zero wavefunction"):
            antisymmetrize(MODE_A, Mode((0.0, 0.0, 1.0), 2.0))

    def test_exchange_antisymmetry_pointwise(self):
        wf = antisymmetrize(MODE_A, MODE_B)
        rng = np.random.default_rng(44)
        for _ in range(50):
            t = rng.uniform(0, 2)
            x1, x2 = rng.normal(size=3), rng.normal(size=3)
            a = wf(t, x1, x2)
            b = wf(t, x2, x1)
            np.testing.assert_allclose(a, -b.T, atol=1e-14)

    def test_exchange_swaps_velocities(self):
        wf = antisymmetrize(MODE_A, MODE_B)
        x1 = np.array([0.7, -0.4, 0.2])
        x2 = np.array([-1.1, 0.5, 0.9])
        v1, v2 = two_weyl_velocities(wf, 0.6, x1, x2)
        w1, w2 = two_weyl_velocities(wf, 0.6, x2, x1)
        np.testing.assert_allclose(v1, w2, atol=1e-13)
        np.testing.assert_allclose(v2, w1, atol=1e-13)

    def test_entangled_pair_subluminal_somewhere(self):
        wf = antisymmetrize(MODE_A, MODE_B)
        grid = np.linspace(-2.0, 2.0, 9)
        best = 0.0
        for ax in grid:
            for az in grid:
                x1 = np.array([ax, 0.0, az])
                d = float(speed_defect(wf, 0.3, x1, np.zeros(3)))
                v1, _ = two_weyl_velocities(wf, 0.3, x1, np.zeros(3))
                assert abs(d - (1.0 - v1 @ v1)) < 1e-10
                best = max(best, d)
        assert best > 0.1
