#!/usr/bin/env python3
"""Deterministic guidance trajectories of a massless fermion.

Builds a superposition of three right-handed positive-frequency plane waves
and integrates the guidance law from a handful of starting points.  Every
trajectory moves at exactly the speed of light at all times; the interplay
of the three modes bends the paths around each other.

Writes column files under demo_out/three_mode/ (render them with plotkit's
`traj3d` command if you want a picture).
"""

from pathlib import Path

import numpy as np

from pilotwave import Mode, WeylWavefunction, integrate_deterministic
from pilotwave.columns import write_trajectory
from pilotwave.dynamics import weyl_velocity_field

out = Path("demo_out/three_mode")
out.mkdir(parents=True, exist_ok=True)

amps = np.array([1.0, np.exp(4j), np.exp(9j)]) / np.sqrt(3.0)
wf = WeylWavefunction([
    Mode((1, 0, 1), amps[0]),
    Mode((-1, -2, -1), amps[1]),
    Mode((1, -1, 1), amps[2]),
])
field = weyl_velocity_field(wf)

starts = [(0, 0, 0), (-1, 0, 0), (0, 0, -1), (0, 0, 1), (0, 1, 0), (1, 0, 0),
          (0, -1, 0)]
for i, x0 in enumerate(starts):
    traj = integrate_deterministic(field, x0, 0.0, 15.0, 1e-3)
    drift = traj.x[-1] - traj.x[0]
    print(f"start {x0}: displacement {np.round(drift, 2)}, "
          f"path length {traj.t[-1] - traj.t[0]:.1f} (luminal), "
          f"|speed-1| < {np.max(np.abs(traj.speed - 1)):.1e}")
    write_trajectory(out / f"trajectory_{i:02d}.txt", traj,
                     [f"three-mode demo, start {x0}"])

print(f"\nwrote {len(starts)} trajectory files to {out}/")
