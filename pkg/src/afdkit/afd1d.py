"""Takenaka-Malmquist systems and 1-d adaptive greedy decomposition.

Given disc parameters a_1, a_2, ... (repeats allowed), the rational
orthonormal system

    B_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{l<k} (z - a_l) / (1 - conj(a_l) z)

is orthonormal on the circle for any parameter choice.  The decomposition
loop alternates a maximal selection of the next parameter (largest energy
gain (1 - |a|^2) |f_k(a)|^2) with a generalized backward shift that removes
the selected kernel and divides out its Blaschke factor, so the remainder
stays in the Hardy space and the energy ledger is exact.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, TruncationError, TruncationWarning
from .hardy import (
    FourierCoeffs1D,
    grid_argmax,
    inner_product_1d,
    next_pow2,
    require_nonzero,
)
from .szego import szego_coeffs

__all__ = [
    "multiplicities",
    "blaschke_eval",
    "tm_matrix",
    "tm_basis",
    "backward_shift",
    "msp_1d",
    "AFDStep",
    "AFDRecord",
    "afd_decompose_1d",
    "reconstruct_1d",
    "hyperbolic_diagnostic",
]

OVERSAMPLE = 4


def _validate_params(params):
    params = [complex(a) for a in params]
    for a in params:
        if abs(a) >= 1.0:
            raise DomainError("parameter |a| must be < 1, got %g" % abs(a))
    return params


def multiplicities(params):
    """Multiplicity of each entry among its predecessors (itself included).

    The k-th value counts how many of a_1..a_k equal a_k, which is the
    ladder order the k-th partial fraction uses.
    """
    seen = {}
    out = []
    for a in params:
        key = complex(a)
        seen[key] = seen.get(key, 0) + 1
        out.append(seen[key])
    return out


def blaschke_eval(params, size):
    """Boundary samples of the Blaschke product with the given zeros.

    Pointwise product of the Moebius factors (z - a) / (1 - conj(a) z) at
    z = exp(2 pi i j / size); unimodular at every sample.
    """
    params = _validate_params(params)
    z = np.exp(2j * np.pi * np.arange(size) / size)
    out = np.ones(size, dtype=complex)
    for a in params:
        out *= (z - a) / (1.0 - np.conj(a) * z)
    return out


def _tm_grid_size(order, oversample=OVERSAMPLE):
    return next_pow2(oversample * (order + 1))


def tm_matrix(params, order, oversample=OVERSAMPLE):
    """Rows of truncated coefficients of B_1..B_n for the given parameters.

    Each basis function is sampled on an oversampled boundary grid (the
    Szego factor times the running Blaschke prefix) and transformed back,
    keeping frequencies 0..order.
    """
    params = _validate_params(params)
    if not params:
        return np.zeros((0, order + 1), dtype=complex)
    size = _tm_grid_size(order, oversample)
    z = np.exp(2j * np.pi * np.arange(size) / size)
    rows = np.empty((len(params), order + 1), dtype=complex)
    prefix = np.ones(size, dtype=complex)
    for k, a in enumerate(params):
        factor = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z)
        spec = np.fft.fft(factor * prefix) / size
        rows[k] = spec[: order + 1]
        prefix *= (z - a) / (1.0 - np.conj(a) * z)
    deficit = float(np.max(np.abs(1.0 - np.sum(np.abs(rows) ** 2, axis=1))))
    if deficit > 1e-8:
        warnings.warn(
            "rational basis loses %.3e of unit norm at order %d; raise the "
            "order or keep |a| smaller" % (deficit, order),
            TruncationWarning,
            stacklevel=2,
        )
    return rows


def tm_basis(params, order, oversample=OVERSAMPLE):
    """The rational orthonormal system as a list of Hardy coefficient vectors."""
    rows = tm_matrix(params, order, oversample)
    return [FourierCoeffs1D(row.copy(), hardy=True) for row in rows]


def backward_shift(f, a, oversample=OVERSAMPLE):
    """Generalized backward shift of a Hardy signal via the point a.

    Returns (f - <f, e_a> e_a) * (1 - conj(a) z) / (z - a), computed by
    pointwise boundary division and projection back onto frequencies
    0..order.  The discarded energy is theoretically zero (the numerator
    vanishes at a); it is asserted below 1e-8 of the input energy, and a
    violation signals insufficient truncation for this |a|.
    """
    if not f.hardy:
        raise DomainError("backward_shift expects Hardy coefficients")
    a = complex(a)
    if abs(a) >= 1.0:
        raise DomainError("parameter |a| must be < 1")
    order = f.order
    atom = szego_coeffs(a, order)
    coeff = inner_product_1d(f, atom)
    residual = f - coeff * atom

    size = _tm_grid_size(order, oversample)
    z = np.exp(2j * np.pi * np.arange(size) / size)
    samples = residual.boundary_samples(size)
    samples *= (1.0 - np.conj(a) * z) / (z - a)
    spec = np.fft.fft(samples) / size
    kept = spec[: order + 1]
    discarded = float(np.sum(np.abs(spec) ** 2) - np.sum(np.abs(kept) ** 2))
    total = f.energy()
    if total > 0 and discarded > 1e-8 * total:
        raise TruncationError(
            "backward shift at |a|=%.4f discards %.3e of the energy; "
            "truncation order %d is too small" % (abs(a), discarded / total, order)
        )
    return FourierCoeffs1D(kept.copy(), hardy=True)


def msp_1d(f, grid):
    """Maximal selection of the next kernel parameter.

    Maximizes (1 - |a|^2) |f(a)|^2 over the grid, the energy a single
    normalized kernel at a would extract.  Returns (a, objective value).
    """
    require_nonzero(f.energy())
    if not f.hardy:
        raise DomainError("msp_1d expects Hardy coefficients")
    data = f.data

    def objective(pts):
        vals = np.polynomial.polynomial.polyval(pts, data)
        return (1.0 - np.abs(pts) ** 2) * np.abs(vals) ** 2

    return grid_argmax(objective, grid)


@dataclass
class AFDStep:
    """One greedy step: parameter, extracted coefficient, remaining energy."""

    a: complex
    coeff: complex
    residual_energy: float


@dataclass
class AFDRecord:
    """Ordered steps of a 1-d decomposition plus the energy ledger."""

    initial_energy: float
    steps: list[AFDStep] = field(default_factory=list)

    def params(self):
        return [s.a for s in self.steps]

    def coeffs(self):
        return [s.coeff for s in self.steps]

    def residual_energies(self):
        return [s.residual_energy for s in self.steps]


def afd_decompose_1d(f, n_terms, grid, threshold=1e-12):
    """Greedy kernel decomposition of a Hardy signal.

    Iterates maximal selection and backward shift for ``n_terms`` steps or
    until the residual energy drops below ``threshold`` times the initial
    energy, whichever comes first.  The record satisfies
    ||f||^2 = sum |coeff_k|^2 + final residual energy.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    require_nonzero(f.energy())
    initial = f.energy()
    remainder = f.copy()
    record = AFDRecord(initial_energy=initial)
    for _ in range(n_terms):
        if remainder.energy() <= threshold * initial:
            break
        a, _ = msp_1d(remainder, grid)
        coeff = inner_product_1d(remainder, szego_coeffs(a, f.order))
        remainder = backward_shift(remainder, a)
        record.steps.append(AFDStep(a=a, coeff=coeff, residual_energy=remainder.energy()))
    return record


def reconstruct_1d(record, order, oversample=OVERSAMPLE):
    """Partial sum sum_k coeff_k B_k rebuilt from a decomposition record."""
    rows = tm_matrix(record.params(), order, oversample) if record.steps else np.zeros((0, order + 1))
    data = np.zeros(order + 1, dtype=complex)
    for step, row in zip(record.steps, rows):
        data += step.coeff * row
    return FourierCoeffs1D(data, hardy=True)


def hyperbolic_diagnostic(params):
    """sum (1 - |a_k|); divergence of this sum marks a complete system."""
    return float(sum(1.0 - abs(complex(a)) for a in params))
