"""Thermal OAM ensembles, mode-sorter measurements and fluctuation theorems."""

from .oscillator import (
    BoltzmannFit,
    ModeIndex,
    ThermalEnsemble,
    abs_ell_occupancy,
    energy,
    fit_boltzmann,
    partition_sum,
    sample_modes,
    thermal_distribution,
)
from .process import (
    LRange,
    ProcessSpec,
    TransitionKernel,
    build_kernel,
    column_sums,
    demon_kernel,
    identity_kernel,
    perturb_kernel,
    shift_superposition_kernel,
)
from .optics import (
    CalibrationSet,
    NoiseModel,
    ObservationSet,
    SorterGeometry,
    apply_noise,
    calibration_profiles,
    render_output,
    simulate_observations,
)
from .reconstruct import FitReport, fit_transition_matrix, residual_norm
from .stats import (
    DEMON_INFORMATION,
    FluctuationResult,
    UncertaintyBand,
    WorkDistribution,
    curve_to_csv,
    default_beta_grid,
    demon_avg,
    exp_avg,
    fluctuation_curve,
    mean_work,
    monte_carlo_band,
    tail_complete_cutoff,
    work_distribution,
    work_value,
)

__version__ = "0.1.0"
