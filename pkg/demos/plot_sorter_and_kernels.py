"""
Processes and the mode sorter
=============================

Build the two-shift superposition process and the feedback (demon) process,
then look at what the camera sees behind the mode sorter.
"""

import numpy as np

from oamthermo import (
    LRange,
    NoiseModel,
    calibration_profiles,
    column_sums,
    demon_kernel,
    shift_superposition_kernel,
    simulate_observations,
)

inputs = LRange(-7, 7)
superpos = shift_superposition_kernel([(5, 0.5), (-5, 0.5)], inputs)
demon = demon_kernel(5, inputs)


def nonzero(kernel, ell):
    return {int(l): float(p) for l, p in zip(kernel.output_range.values, kernel.row(ell)) if p}


# each input splits evenly between ell + 5 and ell - 5
print("superposition row ell=3:", nonzero(superpos, 3))
# the demon always lowers |ell| by 5, except at ell = 0 where it cannot decide
print("demon row ell=3:", nonzero(demon, 3))
print("demon row ell=0:", nonzero(demon, 0))

# column sums tell whether the process is unital
print("superposition column sums:", sorted(set(column_sums(superpos).values())))
print("demon column sums:", sorted(set(column_sums(demon).values())))

# the sorter maps each order to a Gaussian spot on an 80-pixel line
calib = calibration_profiles()
print("spot for ell=0 peaks at pixel", int(np.argmax(calib.profile(0))))
obs = simulate_observations(superpos, calib, NoiseModel(), seed=3)
y = obs[3]
print("camera trace for ell=3, two brightest separated peaks:", int(np.argmax(y[:48])), 48 + int(np.argmax(y[48:])))
