import numpy as np
import pytest

from pilotwave import PAULI, helicity_spinor, minkowski_norm, sigma_dot, weyl_current
from pilotwave.dynamics import weyl_velocity


def random_momenta(n, seed=0):
    rng = np.random.default_rng(seed)
    p = rng.normal(size=(n, 3))
    p *= (10.0 ** rng.uniform(-3, 3, size=n) / np.linalg.norm(p, axis=1))[:, None]
    return p


class TestSigmaDot:
    def test_axis_momenta_reproduce_pauli_matrices(self):
        np.testing.assert_array_equal(sigma_dot([0, 0, 1]), PAULI[2])
        np.testing.assert_array_equal(sigma_dot([1, 0, 0]), PAULI[0])
        np.testing.assert_array_equal(sigma_dot([0, 1, 0]), PAULI[1])

    def test_zero_momentum_gives_zero_matrix(self):
        np.testing.assert_array_equal(sigma_dot([0, 0, 0]), np.zeros((2, 2)))

    def test_hermitian_traceless_clifford(self):
        for p in random_momenta(200, seed=1):
            m = sigma_dot(p)
            assert np.allclose(m, m.conj().T)
            assert abs(np.trace(m)) == 0.0
            np.testing.assert_allclose(m @ m, np.dot(p, p) * np.eye(2),
                                       rtol=0, atol=1e-12 * np.dot(p, p))


class TestHelicitySpinor:
    def test_z_axis_eigenvectors(self):
        np.testing.assert_allclose(helicity_spinor([0, 0, 1], "R"), [1, 0], atol=0)
        np.testing.assert_allclose(helicity_spinor([0, 0, 1], "L"), [0, 1], atol=0)

    def test_x_axis_right_handed(self):
        u = helicity_spinor([1, 0, 0], "R")
        np.testing.assert_allclose(u, np.array([1, 1]) / np.sqrt(2), atol=1e-15)

    def test_zero_momentum_rejected(self):
        with pytest.raises(ValueError, match="helicity undefined"):
            helicity_spinor([0, 0, 0], "R")

    def test_eigen_equation_norm_orthogonality(self):
        for p in random_momenta(2000, seed=2):
            pm = np.linalg.norm(p)
            sd = sigma_dot(p)
            u_r = helicity_spinor(p, "R")
            u_l = helicity_spinor(p, "L")
            assert np.max(np.abs(sd @ u_r - pm * u_r)) < 1e-12 * pm
            assert np.max(np.abs(sd @ u_l + pm * u_l)) < 1e-12 * pm
            assert abs(np.vdot(u_r, u_r).real - 1) < 1e-12
            assert abs(np.vdot(u_l, u_l).real - 1) < 1e-12
            assert abs(np.vdot(u_l, u_r)) < 1e-12

    def test_spin_direction_and_guidance_along_momentum(self):
        # u_R has Bloch vector +p_hat and u_L has -p_hat; the guidance laws
        # (+ for R, - for L) therefore move both positive-frequency plane
        # waves along the momentum direction
        for p in random_momenta(300, seed=3):
            p_hat = p / np.linalg.norm(p)
            u_r = helicity_spinor(p, "R")
            u_l = helicity_spinor(p, "L")
            bloch_r = np.array([np.vdot(u_r, PAULI[i] @ u_r).real for i in range(3)])
            bloch_l = np.array([np.vdot(u_l, PAULI[i] @ u_l).real for i in range(3)])
            np.testing.assert_allclose(bloch_r, p_hat, atol=1e-12)
            np.testing.assert_allclose(bloch_l, -p_hat, atol=1e-12)
            np.testing.assert_allclose(weyl_velocity(u_r, "R"), p_hat, atol=1e-12)
            np.testing.assert_allclose(weyl_velocity(u_l, "L"), p_hat, atol=1e-12)


class TestWeylCurrent:
    def test_basis_spinor_currents(self):
        np.testing.assert_allclose(weyl_current([1, 0], "R"), [1, 0, 0, 1], atol=0)
        np.testing.assert_allclose(weyl_current([0, 1], "R"), [1, 0, 0, -1], atol=0)
        s = np.array([1, 1]) / np.sqrt(2)
        np.testing.assert_allclose(weyl_current(s, "R"), [1, 1, 0, 0], atol=1e-15)

    def test_left_current_negates_spatial_part(self):
        rng = np.random.default_rng(4)
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        j_r = weyl_current(psi, "R")
        j_l = weyl_current(psi, "L")
        assert j_r[0] == j_l[0]
        np.testing.assert_array_equal(j_r[1:], -j_l[1:])

    def test_currents_light_like(self):
        rng = np.random.default_rng(5)
        for _ in range(2000):
            psi = rng.normal(size=2) + 1j * rng.normal(size=2)
            psi /= np.sqrt(np.vdot(psi, psi).real)
            for chi in ("R", "L"):
                assert abs(minkowski_norm(weyl_current(psi, chi))) < 1e-12


class TestMinkowskiNorm:
    @pytest.mark.parametrize("j,expected", [
        ([1, 0, 0, 1], 0.0),
        ([1, 0, 0, 0], 1.0),
        ([2, 1, 1, 1], 1.0),
    ])
    def test_examples(self, j, expected):
        assert minkowski_norm(j) == expected
