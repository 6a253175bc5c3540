import numpy as np
import pytest

from pilotwave import Mode, WeylWavefunction, make_zigzag_state

THREE_MOMENTA = [(1.0, 0.0, 1.0), (-1.0, -2.0, -1.0), (1.0, -1.0, 1.0)]
THREE_AMPS = np.array([1.0, np.exp(4j), np.exp(9j)]) / np.sqrt(3.0)


@pytest.fixture(scope="session")
def three_mode_weyl():
    """The three-mode right-handed positive-energy benchmark state."""
    return WeylWavefunction([
        Mode(p, a, energy_sign=1, handedness="R")
        for p, a in zip(THREE_MOMENTA, THREE_AMPS)
    ])


@pytest.fixture(scope="session")
def heavy_zigzag():
    """The mass-10 three-mode electron benchmark state."""
    return make_zigzag_state(10.0, list(zip(THREE_MOMENTA, THREE_AMPS)))
