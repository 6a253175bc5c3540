#!/usr/bin/env python3
"""One electron, two ontologies.

The same mass-10 three-mode electron state guides
  * a stochastic beable that always moves at light speed and flips between
    its zig (left-field) and zag (right-field) branches at the quantum jump
    rate, and
  * a deterministic beable moving subluminally with the combined current.

The stochastic path is jagged (each kink is a recorded jump event); the
deterministic path is smooth, and over long times the two drift together.

Writes zigzag.txt / dirac.txt / jumps.txt under demo_out/zigzag_vs_dirac/.
"""

from pathlib import Path

import numpy as np

from pilotwave import integrate_deterministic, make_zigzag_state, simulate_zigzag
from pilotwave.columns import write_jumps, write_trajectory
from pilotwave.dynamics import dirac_velocity_field

out = Path("demo_out/zigzag_vs_dirac")
out.mkdir(parents=True, exist_ok=True)

amps = np.array([1.0, np.exp(4j), np.exp(9j)]) / np.sqrt(3.0)
state = make_zigzag_state(10.0, [
    ((1, 0, 1), amps[0]),
    ((-1, -2, -1), amps[1]),
    ((1, -1, 1), amps[2]),
])

start, t1, dt = (0.0, 1.0, 0.0), 15.0, 1e-3
stochastic, events = simulate_zigzag(state, start, "zag", 0.0, t1, dt, seed=42)
smooth = integrate_deterministic(dirac_velocity_field(state), start, 0.0, t1, dt)

print(f"stochastic: {len(events)} jumps over t in [0, {t1:g}], "
      f"every sample at speed 1 (max dev {np.max(np.abs(stochastic.speed-1)):.1e})")
print(f"deterministic: speeds in [{smooth.speed.min():.3f}, {smooth.speed.max():.3f}]"
      " (always subluminal)")
print(f"endpoints: stochastic {np.round(stochastic.x[-1], 2)}, "
      f"deterministic {np.round(smooth.x[-1], 2)}")

write_trajectory(out / "zigzag.txt", stochastic, ["stochastic two-branch demo"])
write_trajectory(out / "dirac.txt", smooth, ["deterministic picture demo"])
write_jumps(out / "jumps.txt", events, ["jump events of the stochastic run"])
print(f"\nwrote zigzag.txt, dirac.txt, jumps.txt to {out}/ "
      "(render with plotkit's `compare` command)")
