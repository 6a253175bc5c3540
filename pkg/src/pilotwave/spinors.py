"""Exact small-dimension spinor algebra: Pauli matrices, helicity eigenspinors,
conserved currents and Minkowski norms.

Conventions
-----------
Two-component spinors are complex ndarrays of shape (2,) (or batches with a
trailing axis of length 2).  Three-momenta are real ndarrays of shape (3,).
Four-currents are real ndarrays (j0, jx, jy, jz).  Handedness is the string
"R" or "L" (helicity +1 / -1 along the momentum).

All operations are pure value transformations at full double precision; no
tolerances are applied inside the algebra.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PAULI",
    "sigma_dot",
    "helicity_spinor",
    "weyl_current",
    "minkowski_norm",
]

# Pauli matrices sigma_1, sigma_2, sigma_3, stacked on the first axis.
PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)

_HANDEDNESS = ("R", "L")


def _check_handedness(chi: str) -> str:
    if chi not in _HANDEDNESS:
        raise ValueError(f"handedness must be 'R' or 'L', got {chi!r}")
    return chi


def sigma_dot(p) -> np.ndarray:
    """Return the 2x2 Hermitian matrix p . sigma.

    Satisfies the Clifford relation sigma_dot(p) @ sigma_dot(p) = |p|^2 * I
    and has zero trace.
    """
    px, py, pz = np.asarray(p, dtype=float)
    return np.array(
        [[pz, px - 1j * py], [px + 1j * py, -pz]],
        dtype=complex,
    )


def helicity_spinor(p, chi: str) -> np.ndarray:
    """Unit-norm eigenspinor of the helicity operator (sigma . p)/|p|.

    chi = "R" returns the +1 eigenvector, chi = "L" the -1 eigenvector.  The
    two are orthonormal for every p.  The overall phase is fixed by projecting
    the eigenprojector onto a fixed basis column; which column is used flips
    with the sign of p_z so that the normalization 1/sqrt(2|p|(|p| +- p_z))
    never degenerates (only a global, physically irrelevant phase differs
    between the two branches).
    """
    _check_handedness(chi)
    p = np.asarray(p, dtype=float)
    px, py, pz = p
    pm = float(np.sqrt(px * px + py * py + pz * pz))
    if pm == 0.0:
        raise ValueError("helicity undefined at p = 0")
    if pz >= 0.0:
        norm = np.sqrt(2.0 * pm * (pm + pz))
        if chi == "R":
            vec = np.array([pm + pz, px + 1j * py], dtype=complex)
        else:
            vec = np.array([-px + 1j * py, pm + pz], dtype=complex)
    else:
        norm = np.sqrt(2.0 * pm * (pm - pz))
        if chi == "R":
            vec = np.array([px - 1j * py, pm - pz], dtype=complex)
        else:
            vec = np.array([pm - pz, -px - 1j * py], dtype=complex)
    return vec / norm


def weyl_current(psi, chi: str) -> np.ndarray:
    """Conserved four-current of a two-component amplitude.

    j0 = psi^dag psi; the spatial part is psi^dag sigma psi for chi = "R" and
    -psi^dag sigma psi for chi = "L".  The result is light-like: its Minkowski
    norm vanishes identically.
    """
    _check_handedness(chi)
    psi = np.asarray(psi, dtype=complex)
    c1, c2 = psi
    j0 = (c1.real * c1.real + c1.imag * c1.imag
          + c2.real * c2.real + c2.imag * c2.imag)
    cross = np.conj(c1) * c2
    jx = 2.0 * cross.real
    jy = 2.0 * cross.imag
    jz = (c1.real * c1.real + c1.imag * c1.imag
          - c2.real * c2.real - c2.imag * c2.imag)
    sign = 1.0 if chi == "R" else -1.0
    return np.array([j0, sign * jx, sign * jy, sign * jz])


def minkowski_norm(j) -> float:
    """g_{mu nu} j^mu j^nu = j0^2 - jx^2 - jy^2 - jz^2."""
    j0, jx, jy, jz = np.asarray(j, dtype=float)
    return float(j0 * j0 - jx * jx - jy * jy - jz * jz)
