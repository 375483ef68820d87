"""
Thermal OAM ensemble and temperature fit
========================================

Prepare a thermal mixture of OAM modes, draw single-photon detections from
it, and recover the inverse temperature from the ``|ell|`` histogram.
"""

import numpy as np

from oamthermo import abs_ell_occupancy, fit_boltzmann, sample_modes, thermal_distribution

beta_hw = 0.67
ens = thermal_distribution(beta_hw, cutoff=7)
print("p(ell) for ell = 0..7:", np.round(ens.probs[7:], 4))

# 300 detections, as in a short camera acquisition
draws = sample_modes(ens, 300, seed=1)
occ = abs_ell_occupancy(draws, cutoff=7)
print("raw |ell| histogram:", np.bincount(np.abs(draws), minlength=8))

# |ell| >= 1 bins hold two states each; the fit works on per-state occupancy
fit = fit_boltzmann(occ)
print(f"fitted beta_hw = {fit.beta_hw_est:.3f} +/- {fit.stderr_beta:.3f} (true {beta_hw})")

# how much does the estimate scatter between acquisitions?
est = [fit_boltzmann(abs_ell_occupancy(sample_modes(ens, 300, s), 7)).beta_hw_est for s in range(200)]
print(f"over 200 acquisitions: mean {np.mean(est):.3f}, sd {np.std(est, ddof=1):.3f}")
