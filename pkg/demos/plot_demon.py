"""
A Maxwell demon acting on OAM
=============================

The demon reads the sign of ``ell`` and shifts the mode towards zero, which
extracts work. One bit of information restores the fluctuation relation.
"""

import math

from oamthermo import (
    DEMON_INFORMATION,
    LRange,
    demon_kernel,
    exp_avg,
    mean_work,
    shift_superposition_kernel,
    thermal_distribution,
    work_distribution,
)

inputs = LRange(-7, 7)
demon = demon_kernel(5, inputs)
plain = shift_superposition_kernel([(5, 0.5), (-5, 0.5)], inputs)

for beta in (0.5, 2.0, 5.0, 50.0):
    d = work_distribution(thermal_distribution(beta, 7), demon)
    avg = exp_avg(d, beta)
    print(
        f"beta_hw {beta:5.1f}: <exp(-sigma)> = {avg:.6f}, "
        f"with I = ln 2: {math.exp(-DEMON_INFORMATION) * avg:.6f}"
    )

# the truncated state misses parents of ell' = +-3, +-4, so the hot end sits
# below two even though the cold limit reaches it
ens = thermal_distribution(2.0, 7)
print(f"<W> at beta_hw = 2: {mean_work(work_distribution(ens, plain)):.3f} without feedback, "
      f"{mean_work(work_distribution(ens, demon)):.3f} with feedback")
