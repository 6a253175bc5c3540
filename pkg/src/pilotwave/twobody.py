"""Two right-handed massless fermions: guidance velocities and speed maps.

The pair amplitude Psi_{a1 a2}(t, x1, x2) is a 2x2 complex array over the two
spin indices, built as a sum of products of single-particle plane-wave modes.
Each particle's velocity contracts the Pauli vector on its own index,

    v1^i = Psi*_{a1 a2} sigma^i_{a1 a} Psi_{a a2} / rho
    v2^i = Psi*_{a1 a2} sigma^i_{a2 a} Psi_{a1 a} / rho

with rho = sum |Psi_{b1 b2}|^2.  Product states give two independently
luminal particles; entanglement makes the motion subluminal.  The deviation
from luminality has the closed form (writing Psi_{ij} = R_ij e^{i theta_ij})

    1 - |v1|^2 = (4 / rho^2) (R11^2 R22^2 + R21^2 R12^2
                 - 2 cos(th11 + th22 - th12 - th21) R11 R22 R12 R21),

which :func:`speed_defect` implements literally; it equals the defect for
either particle.
"""

from __future__ import annotations

import numpy as np

from pilotwave.spinors import PAULI, helicity_spinor
from pilotwave.states import TWO_PI_CUBED_SQRT, Mode

__all__ = [
    "TwoWeylWavefunction",
    "product_pair",
    "antisymmetrize",
    "two_weyl_velocities",
    "speed_defect",
]


def _mode_field(mode: Mode):
    """Single-particle evaluator x -> (2,) amplitude for a plane-wave mode."""
    p = np.asarray(mode.p, dtype=float)
    energy = np.linalg.norm(p)
    chi = mode.handedness if mode.energy_sign > 0 else ("L" if mode.handedness == "R" else "R")
    u = helicity_spinor(p, chi)
    sign = mode.energy_sign
    amp = complex(mode.amplitude)

    def field(t, x):
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * (x @ p - sign * energy * t))
        return (amp / TWO_PI_CUBED_SQRT) * np.multiply.outer(phase, u)

    return field


class TwoWeylWavefunction:
    """Sum of spin (x) position product terms for two right-handed fermions."""

    def __init__(self, terms):
        """``terms`` is a list of (field_a, field_b, coefficient) triples,
        each field mapping (t, x) to a (2,) amplitude for one particle."""
        self._terms = list(terms)
        if not self._terms:
            raise ValueError("need at least one product term")

    def __call__(self, t, x1, x2) -> np.ndarray:
        """Spin amplitude array of shape (..., 2, 2) at (t, x1, x2)."""
        total = None
        for field_a, field_b, coeff in self._terms:
            a = field_a(t, x1)
            b = field_b(t, x2)
            term = coeff * (a[..., :, None] * b[..., None, :])
            total = term if total is None else total + term
        return total

    def density(self, t, x1, x2) -> np.ndarray:
        psi = self(t, x1, x2)
        return np.sum(np.abs(psi) ** 2, axis=(-2, -1))


def product_pair(mode_a: Mode, mode_b: Mode) -> TwoWeylWavefunction:
    """Unentangled pair: particle 1 in mode a, particle 2 in mode b."""
    return TwoWeylWavefunction([(_mode_field(mode_a), _mode_field(mode_b), 1.0)])


def antisymmetrize(mode_a: Mode, mode_b: Mode) -> TwoWeylWavefunction:
    """Fermionic pair (a(x1) b(x2) - b(x1) a(x2)) / sqrt(2).

    The exchange applies to the full spin (x) position labels, so
    Psi_{a1 a2}(x1, x2) = -Psi_{a2 a1}(x2, x1) pointwise.  Identical modes
    would annihilate the state and are rejected.
    """
    same_p = np.allclose(mode_a.p, mode_b.p, rtol=0.0, atol=0.0)
    if same_p and mode_a.energy_sign == mode_b.energy_sign \
            and mode_a.handedness == mode_b.handedness:
        raise ValueError("identical modes give the zero wavefunction (exclusion)")
    fa, fb = _mode_field(mode_a), _mode_field(mode_b)
    inv = 1.0 / np.sqrt(2.0)
    return TwoWeylWavefunction([(fa, fb, inv), (fb, fa, -inv)])


def two_weyl_velocities(wf: TwoWeylWavefunction, t, x1, x2):
    """Velocities (v1, v2) of the two beables at configuration (x1, x2)."""
    psi = np.asarray(wf(t, x1, x2))
    rho = np.sum(np.abs(psi) ** 2, axis=(-2, -1))
    if np.any(rho <= 0.0):
        raise ValueError("velocities undefined where the pair density vanishes")
    v1 = np.einsum("...ab,iac,...cb->...i", np.conj(psi), PAULI, psi).real
    v2 = np.einsum("...ab,ibc,...ac->...i", np.conj(psi), PAULI, psi).real
    return v1 / rho[..., None], v2 / rho[..., None]


def speed_defect(wf: TwoWeylWavefunction, t, x1, x2):
    """1 - |v1|^2 via the closed form in moduli R_ij and phases theta_ij."""
    psi = np.asarray(wf(t, x1, x2))
    rho = np.sum(np.abs(psi) ** 2, axis=(-2, -1))
    if np.any(rho <= 0.0):
        raise ValueError("speed defect undefined where the pair density vanishes")
    r = np.abs(psi)
    th = np.angle(psi)
    r11, r12 = r[..., 0, 0], r[..., 0, 1]
    r21, r22 = r[..., 1, 0], r[..., 1, 1]
    phase = th[..., 0, 0] + th[..., 1, 1] - th[..., 0, 1] - th[..., 1, 0]
    return (4.0 / rho ** 2) * (r11 ** 2 * r22 ** 2 + r21 ** 2 * r12 ** 2
                               - 2.0 * np.cos(phase) * r11 * r22 * r12 * r21)
