"""Recover a transition kernel from calibration and output profiles.

Each measured output ``y_i`` is modelled as ``sum_j a_ij x_j`` with the row
``a_i`` on the probability simplex. The rows decouple; each one is the
quadratic program

    minimise   0.5 * ||y_i - a_i X||^2
    subject to a_i >= 0,  sum(a_i) = 1

solved by projected gradient with Barzilai-Borwein steps, all rows advanced
together as one batch. Rows that reach tolerance are finished with an exact
solve on their support, so the returned rows satisfy the KKT conditions to
rounding error whenever the support has been identified.
"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .io import dumps_json
from .optics import ObservationSet, _embed
from .process import LRange, TransitionKernel


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class FitReport:
    kernel: TransitionKernel
    residual: float
    iterations: int
    converged: bool

    def to_dict(self):
        k = self.kernel
        return {
            "input_range": [k.input_range.lo, k.input_range.hi],
            "output_range": [k.output_range.lo, k.output_range.hi],
            "kernel": k.matrix.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def to_json(self):
        return dumps_json(self.to_dict())


def project_simplex(v):
    """Euclidean projection of each row of ``v`` onto the probability simplex.

    Sort-based: with ``u`` sorted descending, the threshold is
    ``(sum(u[:r]) - 1) / r`` for the largest ``r`` keeping ``u[r-1]`` above it.
    """
    v = np.atleast_2d(np.asarray(v, dtype=float))
    n = v.shape[1]
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    r = np.arange(1, n + 1)
    cond = u - css / r > 0
    rho = n - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(v.shape[0]), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _objective(a, gram, b, yy):
    # 0.5 * ||y - a X||^2 expanded through the Gram matrix
    return 0.5 * np.einsum("ij,jk,ik->i", a, gram, a) - np.einsum("ij,ij->i", a, b) + 0.5 * yy


def _pg_residual(a, g):
    return np.abs(a - project_simplex(a - g)).max(axis=1)


def kkt_violation(a, gram, b):
    """Largest KKT violation of each row of ``a`` for ``0.5 a G a^T - b a^T``.

    The multiplier of the sum constraint is estimated as the mean gradient
    over the support. Stationarity requires the gradient to equal it on the
    support and to be no smaller off the support.
    """
    a = np.atleast_2d(a)
    g = a @ gram - b
    out = np.empty(a.shape[0])
    for i in range(a.shape[0]):
        s = a[i] > 0
        lam = g[i, s].mean()
        on = np.abs(g[i, s] - lam).max()
        off = np.max(lam - g[i, ~s], initial=0.0)
        out[i] = max(on, off)
    return out


_SUPPORT_THRESHOLDS = (0.0, 1e-12, 1e-9, 1e-6)


def _polish_row(a, gram, b, tol, threshold):
    """Exact solve on the entries of ``a`` above ``threshold``; None unless KKT holds."""
    s = np.flatnonzero(a > threshold)
    k = s.size
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = gram[np.ix_(s, s)]
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.append(b[s], 1.0)
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError:
        return None
    if np.any(sol[:k] <= 0):
        return None
    out = np.zeros_like(a)
    out[s] = sol[:k]
    out[s] /= out[s].sum()
    g = out @ gram - b
    lam = -sol[k]
    if np.any(g[np.setdiff1d(np.arange(a.size), s)] < lam - tol):
        return None
    return out


def solve_simplex_lsq(gram, b, yy, tol=1e-10, max_iter=10000):
    """Batched simplex-constrained least squares.

    Parameters
    ----------
    gram : (m, m) array
        ``X X^T`` for the calibration profiles ``X``.
    b : (n, m) array
        ``Y X^T`` for the ``n`` observed rows.
    yy : (n,) array
        Squared norms of the observed rows (only shifts the objective).

    Returns
    -------
    a : (n, m) array
    iterations : (n,) int array
    converged : (n,) bool array
    """
    n, m = b.shape
    lmax = np.linalg.eigvalsh(gram)[-1]
    step_min, step_max = 1e-10 / lmax, 1e10 / lmax

    a = np.full((n, m), 1.0 / m)
    g = a @ gram - b
    f = _objective(a, gram, b, yy)
    step = np.full(n, 1.0 / lmax)
    iters = np.zeros(n, dtype=int)
    done = _pg_residual(a, g) <= tol

    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        aa, ga, ba = a[act], g[act], b[act]
        trial = project_simplex(aa - step[act, None] * ga)
        ft = _objective(trial, gram, ba, yy[act])
        bad = ft > f[act]
        if np.any(bad):
            # non-monotone BB step: take the safe 1/L step instead
            trial[bad] = project_simplex(aa[bad] - ga[bad] / lmax)
            ft[bad] = _objective(trial[bad], gram, ba[bad], yy[act][bad])
        gt = trial @ gram - ba
        s = trial - aa
        r = gt - ga
        sr = np.einsum("ij,ij->i", s, r)
        ss = np.einsum("ij,ij->i", s, s)
        with np.errstate(divide="ignore", invalid="ignore"):
            bb = np.where(sr > 0, ss / sr, step_max)
        step[act] = np.clip(bb, step_min, step_max)
        a[act], g[act], f[act] = trial, gt, ft
        iters[act] += 1
        done[act] = _pg_residual(trial, gt) <= tol

    for i in np.flatnonzero(done):
        # PG leaves tiny positive entries on the support boundary; try dropping them
        for thr in _SUPPORT_THRESHOLDS:
            p = _polish_row(a[i], gram, b[i], tol, thr)
            if p is not None:
                a[i] = p
                break
    return a, iters, done


def _as_observations(observations):
    if isinstance(observations, ObservationSet):
        return observations
    if isinstance(observations, Mapping):
        ells = sorted(observations)
        if ells != list(range(ells[0], ells[0] + len(ells))):
            raise InputError("observed input orders must be consecutive")
        return ObservationSet(
            LRange(ells[0], ells[-1]), np.array([observations[l] for l in ells], dtype=float)
        )
    raise InputError(f"unsupported observation container {type(observations).__name__}")


def fit_transition_matrix(calib, observations, tol=1e-10, max_iter=10000):
    """Least-squares transition kernel with nonnegative, unit-sum rows.

    The fitted kernel's output orders are the calibrated orders. Rows that do
    not reach ``tol`` within ``max_iter`` keep their last (feasible) iterate
    and the report says ``converged=False``.
    """
    obs = _as_observations(observations)
    x = calib.matrix
    y = obs.matrix
    if y.ndim != 2 or y.shape[1] != x.shape[1]:
        raise InputError(f"observations have {y.shape[-1]} bins, calibration has {x.shape[1]}")
    gram = x @ x.T
    b = y @ x.T
    yy = np.einsum("ij,ij->i", y, y)
    a, iters, done = solve_simplex_lsq(gram, b, yy, tol=tol, max_iter=max_iter)
    kernel = TransitionKernel(obs.input_range, calib.ell_range, a)
    res = float(np.linalg.norm(y - a @ x))
    return FitReport(kernel, res, int(iters.max(initial=0)), bool(done.all()))


def residual_norm(kernel, calib, observations):
    """Frobenius norm of ``Y - A X``."""
    obs = _as_observations(observations)
    if kernel.input_range != obs.input_range:
        raise InputError("kernel inputs and observed inputs differ")
    if obs.matrix.shape[1] != calib.matrix.shape[1]:
        raise InputError("observation and calibration bin counts differ")
    a = _embed(kernel.matrix, kernel.output_range, calib)
    return float(np.linalg.norm(obs.matrix - a @ calib.matrix))
