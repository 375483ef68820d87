"""
The fluctuation average across temperature
==========================================

Compute the exponential work average for the superposition process over the
inverse-temperature grid, with and without truncating the thermal state.
"""

import numpy as np

from oamthermo import (
    LRange,
    default_beta_grid,
    fluctuation_curve,
    shift_superposition_kernel,
    tail_complete_cutoff,
    thermal_distribution,
    work_distribution,
)

grid = default_beta_grid()
shifts = [(5, 0.5), (-5, 0.5)]

# truncating at |ell| <= 7 pulls the average below one when the state is hot
small = shift_superposition_kernel(shifts, LRange(-7, 7))
trunc = np.array([r.value for r in fluctuation_curve(small, 7, grid)])

# keep enough orders that the omitted thermal tail is negligible everywhere
L = tail_complete_cutoff(grid.min())
full = np.array([r.value for r in fluctuation_curve(shift_superposition_kernel(shifts, LRange(-L, L)), L, grid)])

for b in (0.1, 0.5, 1.0, 2.0, 5.0):
    i = int(np.argmin(np.abs(grid - b)))
    print(f"beta_hw {grid[i]:4.2f}: truncated {trunc[i]:.6f}   untruncated {full[i]:.12f}")

print("work distribution at beta_hw = 2:", work_distribution(thermal_distribution(2.0, 7), small).as_dict())
