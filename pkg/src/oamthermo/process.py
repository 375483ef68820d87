"""Stochastic processes on OAM orders as row-stochastic transition kernels.

Only branch probabilities matter for measurements in the OAM basis, so a
coherent operation such as ``(L+5 + L-5)/sqrt(2)`` is represented by the
kernel with probability 1/2 on each branch.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .io import read_csv, rows_to_csv
from .rng import substream

ROW_SUM_TOL = 1e-9

PROCESS_KINDS = ("shift_superposition", "demon", "identity", "custom")


@dataclass(frozen=True)
class LRange:
    """Inclusive range of OAM orders ``lo..hi``."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range: lo={self.lo} > hi={self.hi}")

    @classmethod
    def symmetric(cls, n):
        return cls(-n, n)

    @property
    def size(self):
        return self.hi - self.lo + 1

    @property
    def values(self):
        return np.arange(self.lo, self.hi + 1)

    def __contains__(self, ell):
        return self.lo <= ell <= self.hi

    def covers(self, other):
        return self.lo <= other.lo and other.hi <= self.hi

    def index(self, ell):
        if ell not in self:
            raise KeyError(f"ell={ell} outside [{self.lo}, {self.hi}]")
        return int(ell) - self.lo


@dataclass(frozen=True, eq=False)
class TransitionKernel:
    """Conditional probabilities ``p(ell_out | ell_in)``.

    ``matrix[i, j]`` is the probability of output ``output_range.lo + j``
    given input ``input_range.lo + i``. Entries are nonnegative and every row
    sums to one.
    """

    input_range: LRange
    output_range: LRange
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        shape = (self.input_range.size, self.output_range.size)
        if m.shape != shape:
            raise ValueError(f"matrix shape {m.shape} does not match ranges {shape}")
        if np.any(~np.isfinite(m)) or np.any(m < 0):
            raise ValueError("transition probabilities must be finite and nonnegative")
        dev = np.abs(m.sum(axis=1) - 1.0).max()
        if dev > ROW_SUM_TOL:
            raise ValueError(f"rows must sum to 1 (max deviation {dev:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        if not isinstance(other, TransitionKernel):
            return NotImplemented
        return (
            self.input_range == other.input_range
            and self.output_range == other.output_range
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def row(self, ell):
        return self.matrix[self.input_range.index(ell)]

    def prob(self, ell_out, ell_in):
        if ell_out not in self.output_range:
            return 0.0
        return float(self.matrix[self.input_range.index(ell_in), self.output_range.index(ell_out)])

    def restrict_inputs(self, input_range):
        if not self.input_range.covers(input_range):
            raise ValueError("requested inputs are not covered by the kernel")
        i0 = input_range.lo - self.input_range.lo
        return TransitionKernel(
            input_range, self.output_range, self.matrix[i0 : i0 + input_range.size]
        )

    def to_csv(self):
        header = ["ell_in\\ell_out"] + [str(l) for l in self.output_range.values]
        rows = [[str(l)] + list(r) for l, r in zip(self.input_range.values, self.matrix)]
        return rows_to_csv(header, rows)

    @classmethod
    def from_csv(cls, text):
        table = read_csv(text)
        outs = [int(v) for v in table[0][1:]]
        ins = [int(r[0]) for r in table[1:]]
        m = np.array([[float(v) for v in r[1:]] for r in table[1:]])
        _check_contiguous(outs, "output")
        _check_contiguous(ins, "input")
        return cls(LRange(ins[0], ins[-1]), LRange(outs[0], outs[-1]), m)


def _check_contiguous(ells, what):
    if ells != list(range(ells[0], ells[0] + len(ells))):
        raise ValueError(f"{what} orders must be consecutive and increasing")


@dataclass(frozen=True)
class ProcessSpec:
    """Declarative description of a process.

    ``delta_F`` is the free-energy change in units of hbar*omega; every
    built-in process leaves the Hamiltonian unchanged, so it is 0 for them.
    ``kernel_csv`` points at a kernel file for ``kind="custom"``.
    """

    kind: str = "shift_superposition"
    shifts: tuple = ((5, 0.5), (-5, 0.5))
    demon_shift: int = 5
    delta_F: float = 0.0
    kernel_csv: Optional[str] = None

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"kind must be one of {PROCESS_KINDS}, got {self.kind!r}")
        shifts = tuple((int(s), float(w)) for s, w in self.shifts)
        object.__setattr__(self, "shifts", shifts)
        if self.kind == "shift_superposition":
            _check_shifts(shifts)
        if self.kind == "demon" and self.demon_shift < 1:
            raise ValueError(f"demon_shift must be >= 1, got {self.demon_shift}")
        if self.kind == "custom" and not self.kernel_csv:
            raise ValueError("custom process needs kernel_csv")


def _check_shifts(shifts):
    if not shifts:
        raise ValueError("shift list is empty")
    s = [x for x, _ in shifts]
    w = np.array([x for _, x in shifts])
    if len(set(s)) != len(s):
        raise ValueError(f"shifts must be distinct, got {s}")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"shift weights must be a probability vector, got {w.tolist()}")


def shift_superposition_kernel(shifts, input_range):
    """Kernel sending ``ell -> ell + s`` with probability ``w`` for each ``(s, w)``."""
    shifts = [(int(s), float(w)) for s, w in shifts]
    _check_shifts(shifts)
    s_vals = [s for s, _ in shifts]
    out = LRange(input_range.lo + min(s_vals), input_range.hi + max(s_vals))
    m = np.zeros((input_range.size, out.size))
    rows = np.arange(input_range.size)
    for s, w in shifts:
        m[rows, rows + s - min(s_vals)] += w
    return TransitionKernel(input_range, out, m)


def identity_kernel(input_range):
    return TransitionKernel(input_range, input_range, np.eye(input_range.size))


def demon_kernel(shift, input_range):
    """Sign-resolved feedback: ``L+shift`` on negative ``ell``, ``L-shift`` on positive.

    The ``ell = 0`` row carries no sign information and keeps both branches
    with probability 1/2.
    """
    if shift < 1:
        raise ValueError(f"shift must be >= 1, got {shift}")
    targets = {}
    for ell in input_range.values:
        if ell < 0:
            targets[ell] = [(ell + shift, 1.0)]
        elif ell > 0:
            targets[ell] = [(ell - shift, 1.0)]
        else:
            targets[ell] = [(shift, 0.5), (-shift, 0.5)]
    reach = [t for v in targets.values() for t, _ in v]
    out = LRange(min(reach), max(reach))
    m = np.zeros((input_range.size, out.size))
    for ell, branches in targets.items():
        for t, w in branches:
            m[input_range.index(ell), out.index(t)] += w
    return TransitionKernel(input_range, out, m)


def build_kernel(spec, input_range):
    """Kernel for a :class:`ProcessSpec` on the given inputs."""
    if spec.kind == "shift_superposition":
        return shift_superposition_kernel(spec.shifts, input_range)
    if spec.kind == "demon":
        return demon_kernel(spec.demon_shift, input_range)
    if spec.kind == "identity":
        return identity_kernel(input_range)
    with open(spec.kernel_csv) as f:
        kernel = TransitionKernel.from_csv(f.read())
    return kernel.restrict_inputs(input_range)


def column_sums(kernel):
    """``{ell_out: sum_ell p(ell_out | ell)}``; all ones certifies a doubly stochastic kernel."""
    sums = kernel.matrix.sum(axis=0)
    return {int(l): float(s) for l, s in zip(kernel.output_range.values, sums)}


def perturb_kernel(kernel, leakage, seed=0, mode="uniform"):
    """Mix each row with spurious power spread over the output range.

    ``uniform`` mixes in the flat distribution; ``jitter`` mixes in a seeded
    random nonnegative row (normalised), emulating uneven residual orders.
    """
    if not 0.0 <= leakage <= 1.0:
        raise ValueError(f"leakage must lie in [0, 1], got {leakage}")
    if leakage == 0.0:
        return kernel
    m = kernel.matrix
    if mode == "uniform":
        noise = np.full_like(m, 1.0 / m.shape[1])
    elif mode == "jitter":
        rng = substream(seed, "process.perturb_kernel")
        noise = rng.random(m.shape)
        noise /= noise.sum(axis=1, keepdims=True)
    else:
        raise ValueError(f"unknown perturbation mode {mode!r}")
    out = (1.0 - leakage) * m + leakage * noise
    out /= out.sum(axis=1, keepdims=True)
    return TransitionKernel(kernel.input_range, kernel.output_range, out)
