"""Pilot-wave dynamics for relativistic fermions.

A numerical laboratory for deterministic guidance trajectories of massless
two-component (Weyl) fermions, the stochastic two-branch ("zig-zag") model of
the massive electron, and Monte Carlo ensemble diagnostics (equivariance,
coarse-grained H-function relaxation, two-particle speed maps).

Units are natural (hbar = c = 1) throughout; the metric signature is
(+, -, -, -).
"""

from pilotwave.spinors import (
    PAULI,
    helicity_spinor,
    minkowski_norm,
    sigma_dot,
    weyl_current,
)
from pilotwave.states import (
    Mode,
    WeylWavefunction,
    ZigzagState,
    dirac_residual,
    evaluate_weyl,
    make_zigzag_state,
    zigzag_coefficients,
)
from pilotwave.dynamics import (
    ZAG,
    ZIG,
    JumpEvent,
    NodeError,
    Trajectory,
    dirac_velocity,
    integrate_deterministic,
    simulate_jump_process,
    simulate_zigzag,
    weyl_velocity,
    zigzag_jump_rate,
)
from pilotwave.ensembles import (
    EnsembleFrame,
    Grid,
    coarse_grained_H,
    evolve_ensemble,
    h_curve,
    sample_density,
)
from pilotwave.twobody import (
    TwoWeylWavefunction,
    antisymmetrize,
    product_pair,
    speed_defect,
    two_weyl_velocities,
)

__version__ = "0.1.0"
