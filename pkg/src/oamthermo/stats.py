"""Two-point-measurement work statistics and their Monte Carlo error bands.

Work is measured in units of hbar*omega. A transition ``ell -> ell'`` costs
``W = |ell'| - |ell|`` and happens with probability ``p_ell * p(ell'|ell)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .io import dumps_json, rows_to_csv
from .optics import NoiseModel, calibration_profiles, simulate_observations
from .oscillator import DEFAULT_CUTOFF, thermal_distribution
from .process import LRange
from .reconstruct import fit_transition_matrix
from .rng import derive_seed

DEMON_INFORMATION = math.log(2.0)

# tail mass exp(-beta * L) < 1e-12 needs L > 27.7 / beta
_TAIL_FACTOR = 30.0


def default_beta_grid(lo=0.05, hi=5.0, step=0.05):
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(n)


def tail_complete_cutoff(beta_min):
    """Smallest cutoff whose omitted thermal tail is below 1e-12 at ``beta_min``."""
    return int(math.ceil(_TAIL_FACTOR / beta_min))


def work_value(ell_in, ell_out):
    return abs(ell_out) - abs(ell_in)


@dataclass(frozen=True, eq=False)
class WorkDistribution:
    """Atoms ``prob[k]`` at integer work values ``work[k]`` (sorted, zero atoms dropped)."""

    work: np.ndarray
    prob: np.ndarray

    def as_dict(self):
        return {int(w): float(p) for w, p in zip(self.work, self.prob)}

    def to_csv(self):
        return rows_to_csv(["work", "probability"], zip(self.work, self.prob))


def _work_table(kernel):
    """Per-input work distribution: ``table[i, k]`` is P(W = w[k] | ell_in = i)."""
    i, j = np.nonzero(kernel.matrix)
    ell_in = kernel.input_range.lo + i
    ell_out = kernel.output_range.lo + j
    w = np.abs(ell_out) - np.abs(ell_in)
    values, col = np.unique(w, return_inverse=True)
    table = np.zeros((kernel.input_range.size, values.size))
    np.add.at(table, (i, col), kernel.matrix[i, j])
    return values, table


def _input_weights(ensemble, kernel):
    support = LRange(-ensemble.cutoff, ensemble.cutoff)
    if not kernel.input_range.covers(support):
        raise ValueError(
            f"ensemble support [{support.lo}, {support.hi}] exceeds kernel inputs "
            f"[{kernel.input_range.lo}, {kernel.input_range.hi}]"
        )
    p = np.zeros(kernel.input_range.size)
    i0 = support.lo - kernel.input_range.lo
    p[i0 : i0 + support.size] = ensemble.probs
    return p


def work_distribution(ensemble, kernel):
    values, table = _work_table(kernel)
    prob = _input_weights(ensemble, kernel) @ table
    keep = prob > 0
    return WorkDistribution(values[keep], prob[keep])


def exp_avg(dist, beta_hw, delta_F=0.0):
    """``<exp(-sigma)>`` with entropy production ``sigma = beta_hw (W - delta_F)``."""
    if beta_hw < 0:
        raise ValueError(f"beta_hw must be nonnegative, got {beta_hw}")
    return float(np.sum(dist.prob * np.exp(-beta_hw * (dist.work - delta_F))))


def demon_avg(dist, beta_hw, delta_F=0.0, information=DEMON_INFORMATION):
    """``<exp(-sigma - I)>`` for feedback that gained ``information`` nats."""
    if information < 0:
        raise ValueError(f"information must be nonnegative, got {information}")
    return math.exp(-information) * exp_avg(dist, beta_hw, delta_F)


def mean_work(dist):
    return float(np.sum(dist.work * dist.prob))


@dataclass(frozen=True)
class FluctuationResult:
    beta_hw: float
    value: float
    mean_work: float
    delta_F: float = 0.0
    information: float = 0.0


def _curve_arrays(kernel, cutoff, beta_grid, delta_F, information):
    beta = np.asarray(beta_grid, dtype=float)
    if np.any(beta <= 0):
        raise ValueError("beta grid values must be positive")
    values, table = _work_table(kernel)
    weights = np.array([_input_weights(thermal_distribution(b, cutoff), kernel) for b in beta])
    pw = weights @ table
    value = np.sum(pw * np.exp(-beta[:, None] * (values[None, :] - delta_F)), axis=1)
    value *= math.exp(-information)
    mw = pw @ values
    return value, mw


def fluctuation_curve(
    kernel, cutoff=DEFAULT_CUTOFF, beta_grid=None, delta_F=0.0, information=0.0
):
    """Thermal fluctuation average over a grid of inverse temperatures.

    With ``information > 0`` each point is ``<exp(-sigma - I)>``, otherwise
    ``<exp(-sigma)>``. The ensemble at every point is truncated to
    ``|ell| <= cutoff``.
    """
    if beta_grid is None:
        beta_grid = default_beta_grid()
    value, mw = _curve_arrays(kernel, cutoff, beta_grid, delta_F, information)
    return [
        FluctuationResult(float(b), float(v), float(m), float(delta_F), float(information))
        for b, v, m in zip(beta_grid, value, mw)
    ]


def curve_to_csv(results):
    """Deterministic curve in the band layout (zero std, degenerate interval)."""
    rows = [(r.beta_hw, r.value, 0.0, r.value, r.value) for r in results]
    return rows_to_csv(["beta_hw", "value", "std", "ci_lo", "ci_hi"], rows)


@dataclass(frozen=True, eq=False)
class UncertaintyBand:
    beta_grid: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    ci95_lo: np.ndarray
    ci95_hi: np.ndarray
    trials: int
    excluded: int = 0

    @property
    def half_width(self):
        return 1.96 * self.std

    def at(self, beta_hw):
        """Index of the grid point nearest ``beta_hw``."""
        return int(np.argmin(np.abs(self.beta_grid - beta_hw)))

    def to_csv(self):
        rows = zip(self.beta_grid, self.mean, self.std, self.ci95_lo, self.ci95_hi)
        return rows_to_csv(["beta_hw", "value", "std", "ci_lo", "ci_hi"], rows)

    def to_json(self):
        return dumps_json(
            {
                "beta_hw": self.beta_grid,
                "mean": self.mean,
                "std": self.std,
                "ci_lo": self.ci95_lo,
                "ci_hi": self.ci95_hi,
                "trials": self.trials,
                "excluded": self.excluded,
            }
        )


def monte_carlo_band(
    kernel,
    geometry=None,
    noise=None,
    cutoff=DEFAULT_CUTOFF,
    beta_grid=None,
    trials=1000,
    seed=0,
    delta_F=0.0,
    information=0.0,
    tol=1e-10,
    max_iter=10000,
):
    """Propagate camera noise through reconstruction into the fluctuation curve.

    Every trial draws fresh noisy observations of ``kernel`` (seeded from
    ``seed`` and the trial index), refits the transition matrix and
    recomputes the curve. Trials whose fit does not converge are dropped and
    counted in ``excluded``. The band is ``mean +/- 1.96 std`` per grid point.
    """
    if trials < 2:
        raise ValueError(f"need at least two trials, got {trials}")
    if beta_grid is None:
        beta_grid = default_beta_grid()
    beta_grid = np.asarray(beta_grid, dtype=float)
    noise = noise if noise is not None else NoiseModel()
    calib = calibration_profiles(geometry)

    curves = []
    excluded = 0
    for t in range(trials):
        s = derive_seed(seed, "stats.monte_carlo_band", t)
        obs = simulate_observations(kernel, calib, noise, s)
        rep = fit_transition_matrix(calib, obs, tol=tol, max_iter=max_iter)
        if not rep.converged:
            excluded += 1
            continue
        value, _ = _curve_arrays(rep.kernel, cutoff, beta_grid, delta_F, information)
        curves.append(value)
    if len(curves) < 2:
        raise RuntimeError(f"only {len(curves)} of {trials} trials converged")
    curves = np.array(curves)

    flat = np.ptp(curves, axis=0) == 0
    mean = np.where(flat, curves[0], curves.mean(axis=0))
    std = np.where(flat, 0.0, curves.std(axis=0, ddof=1))
    return UncertaintyBand(
        beta_grid, mean, std, mean - 1.96 * std, mean + 1.96 * std, len(curves), excluded
    )
