"""Shared helpers for the test suite."""

import numpy as np
import pytest

from afdkit import FourierCoeffs1D, FourierCoeffs2D, grid_points, szego_coeffs
from afdkit.hardy import grid_radii


def kernel_ip(a, b):
    """Closed-form inner product of two normalized kernels <e_a, e_b>."""
    a, b = complex(a), complex(b)
    return np.sqrt(1 - abs(a) ** 2) * np.sqrt(1 - abs(b) ** 2) / (1 - np.conj(b) * a)


def random_hardy_1d(seed, order, decay=1.5):
    """Unit-energy random Hardy signal with polynomially decaying spectrum."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(order + 1) + 1j * rng.standard_normal(order + 1)
    data /= (1.0 + np.arange(order + 1)) ** decay
    f = FourierCoeffs1D(data, hardy=True)
    return (1.0 / f.norm()) * f


def random_hardy_2d(seed, order, decay=1.5):
    rng = np.random.default_rng(seed)
    side = order + 1
    data = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    data /= (1.0 + np.add.outer(np.arange(side), np.arange(side))) ** decay
    f = FourierCoeffs2D(data, hardy=True)
    return (1.0 / f.norm()) * f


def random_real_full_1d(seed, order):
    """Random real bandlimited signal as Hermitian full-range coefficients."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(2 * order + 1) + 1j * rng.standard_normal(2 * order + 1)
    data = (data + np.conj(data[::-1])) / 2.0
    return FourierCoeffs1D(data, hardy=False)


def random_real_full_2d(seed, order):
    rng = np.random.default_rng(seed)
    side = 2 * order + 1
    data = rng.standard_normal((side, side)) + 1j * rng.standard_normal((side, side))
    data = (data + np.conj(data[::-1, ::-1])) / 2.0
    return FourierCoeffs2D(data, hardy=False)


def dominant_atoms_on_grid(seed, grid, order, n_atoms, ratio=16.0, low_frac=0.85):
    """Kernel combination with geometrically dominant amplitudes.

    Atoms sit on actual grid points in the outer radius band, angularly
    spread, so each greedy step has a well-separated maximizer.  Returns
    (signal, params, coeffs).
    """
    rng = np.random.default_rng(seed)
    radii = grid_radii(grid)
    n_rad = radii.size
    lo = int(low_frac * n_rad)
    rad_ids = rng.choice(np.arange(lo, n_rad), size=n_atoms, replace=False)
    stride = grid.angular_count // n_atoms
    ang_ids = (rng.permutation(n_atoms) * stride + rng.integers(0, grid.angular_count)) % grid.angular_count
    params = [
        complex(radii[ri] * np.exp(2j * np.pi * ai / grid.angular_count))
        for ri, ai in zip(rad_ids, ang_ids)
    ]
    coeffs = (1.0 / ratio) ** np.arange(n_atoms) * np.exp(1j * rng.uniform(0, 2 * np.pi, n_atoms))
    f = FourierCoeffs1D.zeros(order, hardy=True)
    for c, a in zip(coeffs, params):
        f = f + complex(c) * szego_coeffs(a, order)
    return f, params, [complex(c) for c in coeffs]


def exhaustive_argmax(objective, spec):
    """Independent scan over the coarse grid point set."""
    pts = grid_points(spec)
    vals = np.asarray([float(objective(np.array([p]))[0]) for p in pts])
    i = int(np.argmax(vals))
    return complex(pts[i]), float(vals[i])


@pytest.fixture
def rng():
    return np.random.default_rng(0)
