"""Shared fixtures and independent mass oracles for the test suite.

The oracles here deliberately avoid the package's clipping kernels: interval
masses come from plain overlap arithmetic, 2-D masses from axis-aligned
products, so solver outputs are re-verified through a separate code path.
"""

import numpy as np
import pytest
from hypothesis import settings

from faircut.measures import box_measure, uniform_box

settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


def interval_mass(measure, a, b):
    """Mass of [a, b] under a 1-D box measure, by direct overlap arithmetic."""
    total = 0.0
    for (lo,), (hi,), w in measure.atoms:
        total += w * max(0.0, min(b, hi) - max(a, lo)) / (hi - lo)
    return total


def necklace_shares(measure_list, cuts, labels, k):
    """Independent share computation for a 1-D necklace split."""
    bounds = [-np.inf] + list(cuts) + [np.inf]
    shares = np.zeros((len(measure_list), k))
    for j, m in enumerate(measure_list):
        lo_all = min(a[0][0] for a in m.atoms) - 1.0
        hi_all = max(a[1][0] for a in m.atoms) + 1.0
        for i, lab in enumerate(labels):
            a = max(bounds[i], lo_all)
            b = min(bounds[i + 1], hi_all)
            if b > a:
                shares[j, lab] += interval_mass(m, a, b)
    return shares

def rect_mass(measure, lo, hi):
    """Mass of an axis-aligned rectangle under a 2-D box measure."""
    total = 0.0
    for alo, ahi, w in measure.atoms:
        frac = 1.0
        for axis in range(2):
            seg = max(0.0, min(hi[axis], ahi[axis]) - max(lo[axis], alo[axis]))
            frac *= seg / (ahi[axis] - alo[axis])
        total += w * frac
    return total


def random_measures_1d(rng, t, n_atoms=(1, 3), span=(0.0, 2.0)):
    out = []
    for _ in range(t):
        n = rng.integers(n_atoms[0], n_atoms[1] + 1)
        atoms = []
        for _ in range(n):
            a = rng.uniform(*span)
            b = a + rng.uniform(0.05, 0.8)
            atoms.append(((a,), (b,), rng.uniform(0.2, 1.0)))
        out.append(box_measure(1, atoms))
    return out


def random_measures_2d(rng, t, n_atoms=(1, 2), span=(0.0, 3.0)):
    out = []
    for _ in range(t):
        n = rng.integers(n_atoms[0], n_atoms[1] + 1)
        atoms = []
        for _ in range(n):
            lo = rng.uniform(span[0], span[1], size=2)
            side = rng.uniform(0.3, 1.2, size=2)
            atoms.append((tuple(lo), tuple(lo + side), rng.uniform(0.3, 1.0)))
        out.append(box_measure(2, atoms))
    return out


@pytest.fixture
def unit_square():
    return uniform_box((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def unit_interval():
    return uniform_box((0.0,), (1.0,))
