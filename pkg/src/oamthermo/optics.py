"""Synthetic mode-sorter camera.

The sorter maps OAM order ``ell`` to a spot centred at
``center0 + slope * ell`` on a 1-D strip of ``pixels`` bins (the vertical
marginal of the camera image). Output beams are incoherent mixtures of
orders, so their marginal is the probability-weighted sum of the
single-order calibration profiles.
"""

from dataclasses import dataclass, field

import numpy as np

from .io import rows_to_csv
from .process import LRange
from .rng import derive_seed, substream


class GeometryError(ValueError):
    pass


class OutOfRangeError(ValueError):
    """A weight falls on an order the calibration does not cover."""


@dataclass(frozen=True)
class SorterGeometry:
    pixels: int = 80
    center0: float = 40.0
    slope: float = 2.5
    width: float = 1.8
    ell_range: LRange = field(default_factory=lambda: LRange(-15, 15))

    def __post_init__(self):
        if self.pixels < 1:
            raise GeometryError(f"pixels must be positive, got {self.pixels}")
        if not self.slope > 0:
            raise GeometryError(f"slope must be positive, got {self.slope}")
        if not self.width > 0:
            raise GeometryError(f"width must be positive, got {self.width}")
        c = self.centers
        if c.min() < 0 or c.max() >= self.pixels:
            raise GeometryError(
                f"calibration centres span [{c.min()}, {c.max()}], outside [0, {self.pixels})"
            )

    @property
    def centers(self):
        return self.center0 + self.slope * self.ell_range.values


@dataclass(frozen=True)
class NoiseModel:
    """Per-bin standard deviation ``rel_std * mean + floor_frac * max(profile)``."""

    rel_std: float = 0.05
    floor_frac: float = 0.001

    def __post_init__(self):
        if not 0.0 <= self.rel_std <= 0.10:
            raise ValueError(f"rel_std must lie in [0, 0.10], got {self.rel_std}")
        if not self.floor_frac >= 0.0:
            raise ValueError(f"floor_frac must be nonnegative, got {self.floor_frac}")

    @property
    def is_zero(self):
        return self.rel_std == 0.0 and self.floor_frac == 0.0


def _profiles_csv(ells, matrix):
    header = ["ell"] + [str(k) for k in range(matrix.shape[1])]
    return rows_to_csv(header, [[str(l)] + list(r) for l, r in zip(ells, matrix)])


@dataclass(frozen=True, eq=False)
class CalibrationSet:
    """Unit-power profile of every order in ``geometry.ell_range``.

    ``matrix[j]`` is the profile of ``ell = geometry.ell_range.lo + j``.
    """

    geometry: SorterGeometry
    matrix: np.ndarray

    @property
    def ell_range(self):
        return self.geometry.ell_range

    def profile(self, ell):
        return self.matrix[self.ell_range.index(ell)]

    def to_csv(self):
        return _profiles_csv(self.ell_range.values, self.matrix)


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Measured output profile for each input order; ``matrix[i]`` belongs to ``input_range.lo + i``."""

    input_range: LRange
    matrix: np.ndarray

    def __getitem__(self, ell):
        return self.matrix[self.input_range.index(ell)]

    def as_dict(self):
        return {int(l): r for l, r in zip(self.input_range.values, self.matrix)}

    def to_csv(self):
        return _profiles_csv(self.input_range.values, self.matrix)


def calibration_profiles(geometry=None):
    """Discretised Gaussian spot for every order, evaluated at bin centres ``0..pixels-1``."""
    geometry = geometry or SorterGeometry()
    k = np.arange(geometry.pixels, dtype=float)
    z = (k[None, :] - geometry.centers[:, None]) / geometry.width
    x = np.exp(-0.5 * z * z)
    x /= x.sum(axis=1, keepdims=True)
    x.setflags(write=False)
    return CalibrationSet(geometry, x)


def _embed(weights, out_range, calib):
    """Place a weight vector over ``out_range`` onto the calibration orders."""
    cr = calib.ell_range
    w = np.asarray(weights, dtype=float)
    full = np.zeros(w.shape[:-1] + (cr.size,))
    lo, hi = max(out_range.lo, cr.lo), min(out_range.hi, cr.hi)
    if lo <= hi:
        full[..., lo - cr.lo : hi - cr.lo + 1] = w[..., lo - out_range.lo : hi - out_range.lo + 1]
    outside = (out_range.values < cr.lo) | (out_range.values > cr.hi)
    if np.any(w[..., outside] != 0):
        raise OutOfRangeError(f"nonzero weight outside calibrated orders [{cr.lo}, {cr.hi}]")
    return full


def render_output(weights, calib):
    """Incoherent camera marginal ``sum_l w_l x_l`` for weights over output orders.

    ``weights`` is a mapping ``{ell: probability}``.
    """
    cr = calib.ell_range
    w = np.zeros(cr.size)
    total = 0.0
    for ell, p in weights.items():
        if ell not in cr:
            if p != 0:
                raise OutOfRangeError(f"order {ell} outside calibrated [{cr.lo}, {cr.hi}]")
            continue
        w[cr.index(ell)] += p
        total += p
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got {total}")
    return w @ calib.matrix


def render_kernel(kernel, calib):
    """Noiseless observation matrix ``A X`` for every kernel input row."""
    a = _embed(kernel.matrix, kernel.output_range, calib)
    return a @ calib.matrix


def apply_noise(profile, model, seed):
    """Independent normal draw per bin, clamped at zero."""
    profile = np.asarray(profile, dtype=float)
    if model.is_zero:
        return profile.copy()
    sd = model.rel_std * profile + model.floor_frac * profile.max()
    rng = substream(seed, "optics.apply_noise")
    noisy = profile + sd * rng.standard_normal(profile.shape)
    return np.maximum(noisy, 0.0)


def simulate_observations(kernel, calib, model, seed):
    """Noisy camera marginals for every input order of ``kernel``.

    Each input row gets its own seed derived from ``(seed, ell)``, so rows are
    independent of evaluation order.
    """
    clean = render_kernel(kernel, calib)
    ells = kernel.input_range.values
    rows = [
        apply_noise(y, model, derive_seed(seed, "optics.simulate_observations", ell))
        for ell, y in zip(ells, clean)
    ]
    return ObservationSet(kernel.input_range, np.array(rows))
