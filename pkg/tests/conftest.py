"""Shared finite-difference oracles for the test suite.

These are deliberately independent of the library's analytic derivative code:
they only ever difference values of the function under test.
"""

import numpy as np
import pytest


def central_d1(fn, x, h=1e-6):
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def central_d2(fn, x, h=1e-4):
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)


def central_d2_richardson(fn, x, h=1e-4):
    """Fourth-order second difference: Richardson over steps h and h/2."""
    coarse = central_d2(fn, x, h)
    fine = central_d2(fn, x, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def partial_d1(fn, x, y, axis, h=1e-6):
    if axis == 0:
        return (fn(x + h, y) - fn(x - h, y)) / (2.0 * h)
    return (fn(x, y + h) - fn(x, y - h)) / (2.0 * h)


def partial_d2(fn, x, y, axis, h=1e-4):
    if axis == 0:
        return (fn(x + h, y) - 2.0 * fn(x, y) + fn(x - h, y)) / (h * h)
    return (fn(x, y + h) - 2.0 * fn(x, y) + fn(x, y - h)) / (h * h)


def partial_d1_richardson(fn, x, y, axis, h=1e-2):
    """Sixth-order first difference: two Richardson levels over h, h/2, h/4."""
    def level(hh):
        coarse = partial_d1(fn, x, y, axis, hh)
        fine = partial_d1(fn, x, y, axis, hh / 2.0)
        return (4.0 * fine - coarse) / 3.0

    return (16.0 * level(h / 2.0) - level(h)) / 15.0


def partial_d2_richardson(fn, x, y, axis, h=1e-2):
    """Sixth-order second difference: two Richardson levels over h, h/2, h/4."""
    def level(hh):
        coarse = partial_d2(fn, x, y, axis, hh)
        fine = partial_d2(fn, x, y, axis, hh / 2.0)
        return (4.0 * fine - coarse) / 3.0

    return (16.0 * level(h / 2.0) - level(h)) / 15.0


def mixed_d2(fn, x, y, h=1e-4):
    return (fn(x + h, y + h) - fn(x + h, y - h)
            - fn(x - h, y + h) + fn(x - h, y - h)) / (4.0 * h * h)


def rel_err(approx, exact, floor=1.0):
    approx = np.asarray(approx, float)
    exact = np.asarray(exact, float)
    return np.abs(approx - exact) / np.maximum(np.abs(exact), floor)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
