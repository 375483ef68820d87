"""2-D isotropic harmonic oscillator restricted to the p = 0 (pure OAM) states.

Energies are in units of hbar*omega and temperatures enter only through the
dimensionless inverse temperature ``beta_hw = beta * hbar * omega``.
"""

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import least_squares

from .rng import substream

DEFAULT_CUTOFF = 7


class UnderdeterminedFitError(ValueError):
    """Raised when a histogram carries too little information for a fit."""


@dataclass(frozen=True)
class ModeIndex:
    """An oscillator eigenstate labelled by azimuthal ``ell`` and radial ``p``."""

    ell: int
    p: int = 0

    def __post_init__(self):
        if self.p < 0:
            raise ValueError(f"radial number must be nonnegative, got {self.p}")


def energy(mode):
    """Energy of ``mode`` in units of hbar*omega, ``|ell| + 2p + 1``."""
    return float(abs(mode.ell) + 2 * mode.p + 1)


@dataclass(frozen=True)
class ThermalEnsemble:
    """Truncated Boltzmann distribution over ``-cutoff <= ell <= cutoff``.

    ``probs[i]`` is the probability of ``ell = ells[i]``; the support is
    renormalised after truncation.
    """

    beta_hw: float
    cutoff: int
    probs: np.ndarray

    @property
    def ells(self):
        return np.arange(-self.cutoff, self.cutoff + 1)

    def prob(self, ell):
        if abs(ell) > self.cutoff:
            return 0.0
        return float(self.probs[ell + self.cutoff])

    def as_dict(self):
        return {int(l): float(p) for l, p in zip(self.ells, self.probs)}


def _check_beta(beta_hw):
    if not beta_hw > 0 or not np.isfinite(beta_hw):
        raise ValueError(f"beta_hw must be positive and finite, got {beta_hw!r}")


def thermal_distribution(beta_hw, cutoff=DEFAULT_CUTOFF):
    """Thermal occupation ``p_ell ~ exp(-beta_hw (|ell| + 1))`` on ``|ell| <= cutoff``."""
    _check_beta(beta_hw)
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    cutoff = int(cutoff)
    a = np.abs(np.arange(-cutoff, cutoff + 1))
    # the common exp(-beta_hw) factor cancels; dropping it avoids underflow
    w = np.exp(-beta_hw * a)
    probs = w / w.sum()
    probs.setflags(write=False)
    return ThermalEnsemble(float(beta_hw), cutoff, probs)


def partition_sum(beta_hw, cutoff=None):
    """Sum of Boltzmann factors ``exp(-beta_hw (|ell| + 1))``.

    With ``cutoff=None`` the infinite sum is returned in closed form,
    ``q (1 + q) / (1 - q)`` with ``q = exp(-beta_hw)``.
    """
    _check_beta(beta_hw)
    q = np.exp(-beta_hw)
    if cutoff is None:
        return float(q * (1.0 + q) / -np.expm1(-beta_hw))
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    k = np.arange(1, int(cutoff) + 1)
    terms = 2.0 * np.exp(-beta_hw * (k + 1))
    # correctly rounded, hence monotone in the cutoff
    return math.fsum(np.append(terms, q))


def sample_modes(ensemble, n, seed):
    """Draw ``n`` values of ``ell`` from ``ensemble`` by inverse-CDF sampling.

    Returns an integer array. The draw is a pure function of
    ``(ensemble, n, seed)``.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    rng = substream(seed, "oscillator.sample_modes")
    cdf = np.cumsum(ensemble.probs)
    u = rng.random(int(n)) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(cdf) - 1)
    return ensemble.ells[idx]


def abs_ell_occupancy(samples, cutoff=DEFAULT_CUTOFF):
    """Per-state counts indexed by ``|ell|``.

    The raw histogram of ``|ell|`` counts both ``+ell`` and ``-ell`` for every
    ``|ell| >= 1``; dividing those bins by the degeneracy 2 gives the occupancy
    of a single state, which is what the Boltzmann factor describes.
    """
    a = np.abs(np.asarray(samples, dtype=int))
    if a.size and a.max() > cutoff:
        raise ValueError(f"sample |ell| = {a.max()} exceeds cutoff {cutoff}")
    counts = np.bincount(a, minlength=cutoff + 1).astype(float)
    counts[1:] /= 2.0
    return counts


@dataclass(frozen=True)
class BoltzmannFit:
    beta_hw_est: float
    normalization: float
    stderr_beta: float


def fit_boltzmann(counts):
    """Fit ``N exp(-beta_hw (|ell| + 1))`` to a normalised occupancy histogram.

    Parameters
    ----------
    counts : mapping or array_like
        Nonnegative per-state occupancy keyed by ``|ell|`` (a mapping), or a
        sequence whose index is ``|ell|``. Empty bins take part in the fit
        with unit weight.

    Returns
    -------
    BoltzmannFit
        ``stderr_beta`` comes from the Gauss-Newton covariance scaled by the
        residual variance; it is ``nan`` when there are no spare degrees of
        freedom.
    """
    if isinstance(counts, Mapping):
        k = np.array(sorted(counts), dtype=float)
        c = np.array([counts[j] for j in sorted(counts)], dtype=float)
    else:
        c = np.asarray(counts, dtype=float)
        k = np.arange(c.size, dtype=float)
    if np.any(c < 0) or np.any(k < 0):
        raise ValueError("counts and |ell| keys must be nonnegative")
    nz = c > 0
    if np.count_nonzero(nz) < 2:
        raise UnderdeterminedFitError("need at least two nonzero |ell| bins")
    y = c / c.sum()

    # log-linear start; exact for noiseless exponential data
    slope, intercept = np.polyfit(k[nz] + 1.0, np.log(y[nz]), 1)
    x0 = np.array([np.exp(intercept), -slope])

    def resid(theta):
        return theta[0] * np.exp(-theta[1] * (k + 1.0)) - y

    res = least_squares(resid, x0, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    norm, beta = res.x

    dof = y.size - 2
    stderr = np.nan
    if dof > 0:
        s2 = 2.0 * res.cost / dof
        jtj = res.jac.T @ res.jac
        try:
            stderr = float(np.sqrt(s2 * np.linalg.inv(jtj)[1, 1]))
        except np.linalg.LinAlgError:
            pass
    return BoltzmannFit(float(beta), float(norm), stderr)
