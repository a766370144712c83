"""Reconstruction grids shared across test modules.

Chosen to sit inside the characteristic image of each boundary: the entropy
solution needs y/x <= 4 at the default horizon, the cdf solution reaches all
y with t < 1/2 automatically, and the sine solution needs |x| < 1.
"""

import numpy as np

RECON_GRIDS = {
    "gross": (np.geomspace(0.25, 4.0, 50), np.linspace(0.0, 1.0, 50)),
    "nash": (np.linspace(-2.0, 2.0, 50), np.linspace(0.0, 1.9, 50)),
    "bobkov": (np.linspace(0.05, 0.95, 50), np.linspace(0.0, 2.0, 50)),
    "three_halves": (np.geomspace(0.1, 5.0, 50), np.linspace(0.0, 5.0, 50)),
    "arccos": (np.linspace(-0.9, 0.9, 50), np.linspace(0.0, 2.0, 50)),
}
