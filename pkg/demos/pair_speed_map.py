#!/usr/bin/env python3
"""Two identical massless fermions are no longer luminal.

A single right-handed fermion always moves at the speed of light.  Put two
identical ones in an antisymmetrized (hence entangled) pair state and their
guidance velocities drop below c wherever the exchange terms interfere.
This script scans the speed defect 1 - |v1|^2 of particle 1 over a plane of
relative positions and prints a small text heat map; a product (unentangled)
pair shows zero defect everywhere.
"""

import numpy as np

from pilotwave import Mode, antisymmetrize, product_pair, speed_defect

mode_a = Mode((0.0, 0.0, 1.0), 1.0)
mode_b = Mode((1.0, 0.0, 0.0), 1.0)
entangled = antisymmetrize(mode_a, mode_b)
product = product_pair(mode_a, mode_b)

grid = np.linspace(-3.0, 3.0, 25)
x2 = np.zeros(3)
ramp = " .:-=+*#%@"

print("speed defect of particle 1, x1 = (a, 0, b) relative to x2 = 0, t = 0.3")
print("(0 = luminal, @ = frozen)\n")
worst = 0.0
for b in grid[::-1]:
    row = ""
    for a in grid:
        d = float(speed_defect(entangled, 0.3, np.array([a, 0.0, b]), x2))
        worst = max(worst, d)
        row += ramp[min(int(d * (len(ramp) - 1) + 0.5), len(ramp) - 1)]
    print("   " + row)

print(f"\nmax defect on this plane: {worst:.3f}")
d_prod = max(float(speed_defect(product, 0.3, np.array([a, 0.0, a]), x2))
             for a in grid)
print(f"same scan for the unentangled product pair: {d_prod:.1e} (luminal)")
