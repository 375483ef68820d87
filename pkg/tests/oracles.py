"""Brute-force reference computations written with plain loops and ``math``.

Nothing here imports the package under test.
"""

import math
from collections import defaultdict


def thermal_probs(beta_hw, cutoff):
    w = {l: math.exp(-beta_hw * (abs(l) + 1)) for l in range(-cutoff, cutoff + 1)}
    z = math.fsum(w.values())
    return {l: v / z for l, v in w.items()}


def superpos_branches(ell, step=5):
    return [(ell + step, 0.5), (ell - step, 0.5)]


def demon_branches(ell, step=5):
    if ell < 0:
        return [(ell + step, 1.0)]
    if ell > 0:
        return [(ell - step, 1.0)]
    return [(step, 0.5), (-step, 0.5)]


def thermal_average(beta_hw, cutoff, branches, f):
    """``sum_{l, l'} p_l p(l'|l) f(|l'| - |l|)`` by explicit double loop."""
    p = thermal_probs(beta_hw, cutoff)
    return math.fsum(
        p[l] * q * f(abs(lo) - abs(l)) for l in p for lo, q in branches(l)
    )


def jarzynski(beta_hw, cutoff, branches, delta_F=0.0):
    return thermal_average(
        beta_hw, cutoff, branches, lambda w: math.exp(-beta_hw * (w - delta_F))
    )


def mean_work(beta_hw, cutoff, branches):
    return thermal_average(beta_hw, cutoff, branches, lambda w: w)


def work_atoms(beta_hw, cutoff, branches):
    d = defaultdict(float)
    p = thermal_probs(beta_hw, cutoff)
    for l in p:
        for lo, q in branches(l):
            d[abs(lo) - abs(l)] += p[l] * q
    return dict(d)


def matrix_average(probs_by_ell, rows_by_ell, beta_hw):
    """Double sum over an explicit ``{ell: {ell_out: prob}}`` kernel."""
    total = 0.0
    for l, pl in probs_by_ell.items():
        for lo, q in rows_by_ell[l].items():
            total += pl * q * math.exp(-beta_hw * (abs(lo) - abs(l)))
    return total
