import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chisquare

from oamthermo.oscillator import (
    ModeIndex,
    UnderdeterminedFitError,
    abs_ell_occupancy,
    energy,
    fit_boltzmann,
    partition_sum,
    sample_modes,
    thermal_distribution,
)

import oracles


@pytest.mark.parametrize(
    "ell, p, expected", [(0, 0, 1.0), (-7, 0, 8.0), (2, 1, 5.0), (15, 0, 16.0)]
)
def test_energy(ell, p, expected):
    assert energy(ModeIndex(ell, p)) == expected


def test_mode_index_defaults_to_p0():
    assert ModeIndex(3).p == 0
    with pytest.raises(ValueError):
        ModeIndex(1, -1)


def test_zero_temperature_limit():
    ens = thermal_distribution(50.0, 7)
    assert abs(ens.prob(0) - 1.0) < 1e-12


def test_ground_state_probability_matches_loop():
    # 15-term loop oracle; closed geometric form gives the same 0.761594...
    expected = oracles.thermal_probs(2.0, 7)[0]
    assert expected == pytest.approx(0.761594306935215, abs=1e-15)
    assert thermal_distribution(2.0, 7).prob(0) == pytest.approx(expected, abs=1e-15)


def test_measured_temperature_ratio():
    ens = thermal_distribution(0.67, 7)
    assert ens.prob(1) / ens.prob(0) == pytest.approx(math.exp(-0.67), rel=1e-12)
    assert ens.prob(1) / ens.prob(0) == pytest.approx(0.5117, abs=5e-5)


def test_nonpositive_beta_rejected():
    for b in (0.0, -1.0, float("nan")):
        with pytest.raises(ValueError):
            thermal_distribution(b, 7)
    with pytest.raises(ValueError):
        thermal_distribution(1.0, -1)


def test_prob_outside_support_is_zero():
    assert thermal_distribution(1.0, 3).prob(4) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 60.0), st.integers(0, 80))
def test_ensemble_invariants(beta, cutoff):
    ens = thermal_distribution(beta, cutoff)
    p = ens.probs
    assert abs(p.sum() - 1.0) < 1e-12
    # symmetric bit-for-bit
    assert np.array_equal(p, p[::-1])
    half = p[cutoff:]
    assert np.all(np.diff(half) <= 0)
    if cutoff >= 1 and half[-1] > 0:
        assert half[1] / half[0] == pytest.approx(math.exp(-beta), rel=1e-12)


def test_partition_sum_limits():
    assert partition_sum(50.0) == pytest.approx(math.exp(-50.0), rel=1e-10)
    assert partition_sum(2.0, 0) == pytest.approx(math.exp(-2.0), rel=1e-15)


def test_partition_sum_closed_form_against_long_sum():
    brute = math.fsum(math.exp(-2.0 * (abs(l) + 1)) for l in range(-200, 201))
    assert brute == pytest.approx(0.17770000226271862, rel=1e-15)
    assert partition_sum(2.0) == pytest.approx(brute, rel=1e-13)


@pytest.mark.parametrize("beta", [0.05, 0.3, 1.0, 2.0, 5.0])
def test_partition_sum_truncation_monotone_and_convergent(beta):
    vals = [partition_sum(beta, L) for L in range(0, int(50 / beta) + 2)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    closed = partition_sum(beta)
    L = math.ceil(50 / beta)
    assert abs(partition_sum(beta, L) - closed) <= 1e-12 * max(1.0, closed)


def test_sampling_degenerate_and_deterministic():
    cold = thermal_distribution(50.0, 7)
    for seed in (0, 1, 12345):
        assert np.all(sample_modes(cold, 10, seed) == 0)
    ens = thermal_distribution(0.67, 7)
    a = sample_modes(ens, 300, 99)
    b = sample_modes(ens, 300, 99)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_modes(ens, 300, 100))


def test_sampling_goodness_of_fit():
    ens = thermal_distribution(0.67, 7)
    draws = sample_modes(ens, 300, 2024)
    observed = np.bincount(np.abs(draws), minlength=8)
    p_abs = np.array([ens.prob(0)] + [2 * ens.prob(k) for k in range(1, 8)])
    expected = 300 * p_abs
    # pool the sparse tail so every expected count is at least 5
    obs = np.append(observed[:5], observed[5:].sum())
    exp = np.append(expected[:5], expected[5:].sum())
    assert chisquare(obs, exp).pvalue > 0.01


def test_sampling_requires_positive_n():
    with pytest.raises(ValueError):
        sample_modes(thermal_distribution(1.0, 3), 0, 0)


def test_occupancy_halves_degenerate_bins():
    occ = abs_ell_occupancy([0, 0, 1, -1, -1, 3], cutoff=3)
    assert occ.tolist() == [2.0, 1.5, 0.0, 0.5]
    with pytest.raises(ValueError):
        abs_ell_occupancy([5], cutoff=3)


def test_fit_exact_exponential():
    k = np.arange(8)
    fit = fit_boltzmann({int(j): 300 * math.exp(-0.67 * (j + 1)) for j in k})
    assert fit.beta_hw_est == pytest.approx(0.67, abs=1e-9)


def test_fit_flat_counts_gives_zero():
    fit = fit_boltzmann([5.0] * 8)
    assert abs(fit.beta_hw_est) < 1e-9


def test_fit_increasing_counts_reports_negative_beta():
    fit = fit_boltzmann([1.0, 2.0, 3.0, 4.0])
    assert fit.beta_hw_est <= 0


def test_fit_underdetermined():
    with pytest.raises(UnderdeterminedFitError):
        fit_boltzmann([10.0, 0.0, 0.0])
    with pytest.raises(UnderdeterminedFitError):
        fit_boltzmann({3: 4.0})


def test_fit_round_trip_on_expected_occupancy():
    for beta in (0.3, 0.67, 1.5, 3.0):
        ens = thermal_distribution(beta, 7)
        counts = {k: 300 * ens.prob(k) for k in range(8)}
        assert fit_boltzmann(counts).beta_hw_est == pytest.approx(beta, abs=1e-9)


def test_fit_stderr_reflects_noise():
    rng = np.random.default_rng(3)
    k = np.arange(8)
    y = np.exp(-0.67 * (k + 1)) * (1 + 0.05 * rng.standard_normal(8))
    fit = fit_boltzmann(y)
    assert 0 < fit.stderr_beta < 0.2
    assert abs(fit.beta_hw_est - 0.67) < 5 * fit.stderr_beta


@given(st.floats(0.1, 3.0))
@settings(max_examples=30, deadline=None)
def test_fit_positive_for_decreasing_counts(beta):
    counts = np.exp(-beta * np.arange(6)) + 1e-3 * np.arange(6)[::-1]
    assert fit_boltzmann(counts).beta_hw_est > 0
