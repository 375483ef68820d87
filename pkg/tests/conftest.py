import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oamthermo.optics import calibration_profiles
from oamthermo.process import LRange, demon_kernel, shift_superposition_kernel

SUPERPOS_SHIFTS = [(5, 0.5), (-5, 0.5)]
INPUTS = LRange(-7, 7)


@pytest.fixture(scope="session")
def calib():
    return calibration_profiles()


@pytest.fixture(scope="session")
def superpos():
    return shift_superposition_kernel(SUPERPOS_SHIFTS, INPUTS)


@pytest.fixture(scope="session")
def demon():
    return demon_kernel(5, INPUTS)


def embed(kernel, out_range):
    """Kernel matrix padded onto ``out_range`` columns."""
    m = np.zeros((kernel.input_range.size, out_range.size))
    j0 = kernel.output_range.lo - out_range.lo
    m[:, j0 : j0 + kernel.output_range.size] = kernel.matrix
    return m
