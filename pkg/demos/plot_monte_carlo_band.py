"""
Error band from camera noise
============================

Repeat the simulated experiment many times, refit each time, and turn the
scatter of the fluctuation curve into a 95% band.
"""

from oamthermo import LRange, NoiseModel, monte_carlo_band, shift_superposition_kernel

kernel = shift_superposition_kernel([(5, 0.5), (-5, 0.5)], LRange(-7, 7))
grid = [0.5, 1.0, 2.0, 3.0]

for rel_std in (0.02, 0.05, 0.10):
    band = monte_carlo_band(kernel, noise=NoiseModel(rel_std=rel_std), beta_grid=grid, trials=200, seed=0)
    i = band.at(2.0)
    print(f"noise {rel_std:4.2f}: beta_hw=2 value {band.mean[i]:.4f} +/- {band.half_width[i]:.4f}")

# the band file has the same columns as the deterministic curve files
print(band.to_csv())
