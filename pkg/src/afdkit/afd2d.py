"""Decomposition of Hardy signals on the 2-torus.

Two routes are provided.  The product rational-system route extends two 1-d
orthonormal systems one parameter pair at a time; step n adds the 2n - 1
cross coefficients with max(k, l) = n, and the pair (a_n, b_n) is chosen to
maximize the energy of that block.  The pure greedy route peels one
normalized tensor kernel e_a (x) e_b per step from the running remainder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .hardy import (
    FourierCoeffs2D,
    grid_argmax_pairs,
    grid_points,
    inner_product_2d,
    require_nonzero,
)
from .afd1d import OVERSAMPLE, _tm_grid_size, blaschke_eval, tm_matrix
from .szego import TensorAtomSpec, tensor_atom_coeffs

__all__ = [
    "product_coeff",
    "dn_energy",
    "MspPairSelection",
    "msp_product_tm",
    "Afd2dStep",
    "Afd2dRecord",
    "afd2d_tm_decompose",
    "reconstruct_product_tm",
    "pga_step",
    "PGAStep",
    "PGARecord",
    "pga_decompose",
    "reconstruct_pga",
]


def _hardy_block(f):
    if not f.hardy:
        raise DomainError("expected Hardy coefficients on the 2-torus")
    return f.data


def product_coeff(f, bk, bl):
    """Cross coefficient <f, bk (x) bl> of a Hardy 2-d signal.

    ``bk`` and ``bl`` are 1-d Hardy coefficient vectors of the same order
    as ``f``.
    """
    C = _hardy_block(f)
    if bk.order != f.order or bl.order != f.order:
        raise DomainError("factor orders must match the signal order")
    return complex(np.conj(bk.data) @ C @ np.conj(bl.data))


def _cross_table(C, rows_a, rows_b):
    """Matrix of <f, B_k (x) B_l> for all row combinations."""
    return np.conj(rows_a) @ C @ np.conj(rows_b).T


def _block_entries(table, n):
    """The 2n - 1 new entries at step n, ordered (k printed first):

    (k, n) for k = 1..n-1, then (n, l) for l = 1..n (0-based slicing below).
    """
    col = table[: n - 1, n - 1]
    row = table[n - 1, :n]
    return np.concatenate([col, row])


def dn_energy(f, history, candidate, oversample=OVERSAMPLE):
    """Energy of the step-n block for one candidate pair.

    Builds both factor systems extended by the candidate and sums the
    squared moduli of the 2n - 1 new cross coefficients.
    """
    a_params = [p[0] for p in history] + [candidate[0]]
    b_params = [p[1] for p in history] + [candidate[1]]
    n = len(a_params)
    rows_a = tm_matrix(a_params, f.order, oversample)
    rows_b = tm_matrix(b_params, f.order, oversample)
    table = _cross_table(_hardy_block(f), rows_a, rows_b)
    return float(np.sum(np.abs(_block_entries(table, n)) ** 2))


def _new_factor_rows(points, prefix_samples, order):
    """Truncated coefficients of the candidate basis functions for one axis.

    Each row is the Szego factor at the candidate point times the fixed
    Blaschke prefix of the axis history, sampled and transformed.
    """
    size = prefix_samples.size
    z = np.exp(2j * np.pi * np.arange(size) / size)
    pts = np.asarray(points, dtype=complex).ravel()
    weights = np.sqrt(1.0 - np.abs(pts) ** 2)
    samples = weights[:, None] / (1.0 - np.conj(pts)[:, None] * z[None, :])
    samples *= prefix_samples[None, :]
    spec = np.fft.fft(samples, axis=1) / size
    return spec[:, : order + 1]


@dataclass
class MspPairSelection:
    """Result of a joint parameter search, with flatness diagnostics.

    ``flat_a`` (``flat_b``) reports that the objective did not vary along
    the first (second) parameter at the selected point, the sign of a
    remainder that depends on one variable only.
    """

    a: complex
    b: complex
    value: float
    flat_a: bool = False
    flat_b: bool = False


def msp_product_tm(f, history, grid, oversample=OVERSAMPLE):
    """Joint maximal selection of the next parameter pair.

    Maximizes the step-n block energy over the product of two copies of the
    polar grid.  The block objective splits into a coupled term plus two
    single-axis terms, so candidate axes are evaluated independently and
    combined, which keeps the search quadratic only in the grid size.
    """
    require_nonzero(f.energy())
    C = _hardy_block(f)
    order = f.order
    a_hist = [p[0] for p in history]
    b_hist = [p[1] for p in history]
    size = _tm_grid_size(order, oversample)
    prefix_a = blaschke_eval(a_hist, size)
    prefix_b = blaschke_eval(b_hist, size)
    hist_rows_a = tm_matrix(a_hist, order, oversample) if a_hist else np.zeros((0, order + 1))
    hist_rows_b = tm_matrix(b_hist, order, oversample) if b_hist else np.zeros((0, order + 1))
    # Fixed-axis inner product tables reused by every candidate.
    left_fixed = np.conj(hist_rows_a) @ C  # (n-1, order+1), rows <f, B_k (x) .>
    right_fixed = C @ np.conj(hist_rows_b).T  # (order+1, n-1)

    def objective(a_pts, b_pts):
        U = _new_factor_rows(a_pts, prefix_a, order)
        V = _new_factor_rows(b_pts, prefix_b, order)
        main = np.abs(np.conj(U) @ C @ np.conj(V).T) ** 2
        gain_a = np.sum(np.abs(np.conj(U) @ right_fixed) ** 2, axis=1)
        gain_b = np.sum(np.abs(left_fixed @ np.conj(V).T) ** 2, axis=0)
        return main + gain_a[:, None] + gain_b[None, :]

    a, b, value = grid_argmax_pairs(objective, grid)

    pts = grid_points(grid)
    col = objective(pts, np.array([b])).ravel()
    row = objective(np.array([a]), pts).ravel()

    def _flat(vals):
        top = float(np.max(vals))
        return bool(top - float(np.min(vals)) <= 1e-12 * max(top, 1e-300))

    return MspPairSelection(a=a, b=b, value=value, flat_a=_flat(col), flat_b=_flat(row))


@dataclass
class Afd2dStep:
    """One product-system step: the pair, its coefficient block, energies."""

    a: complex
    b: complex
    block: np.ndarray
    block_energy: float
    residual_energy: float


@dataclass
class Afd2dRecord:
    initial_energy: float
    steps: list[Afd2dStep] = field(default_factory=list)

    def pairs(self):
        return [(s.a, s.b) for s in self.steps]

    def residual_energies(self):
        return [s.residual_energy for s in self.steps]


def afd2d_tm_decompose(f, n_terms, grid, threshold=1e-12, oversample=OVERSAMPLE):
    """Product rational-system decomposition with joint maximal selection.

    Records, per step, the selected pair, the 2n - 1 new cross coefficients
    and the residual energy ||f||^2 - sum of block energies.  Residuals are
    non-increasing by construction.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    require_nonzero(f.energy())
    C = _hardy_block(f)
    initial = f.energy()
    record = Afd2dRecord(initial_energy=initial)
    history = []
    residual = initial
    for n in range(1, n_terms + 1):
        if residual <= threshold * initial:
            break
        sel = msp_product_tm(f, history, grid, oversample)
        history.append((sel.a, sel.b))
        rows_a = tm_matrix([p[0] for p in history], f.order, oversample)
        rows_b = tm_matrix([p[1] for p in history], f.order, oversample)
        block = _block_entries(_cross_table(C, rows_a, rows_b), n)
        block_energy = float(np.sum(np.abs(block) ** 2))
        residual -= block_energy
        record.steps.append(
            Afd2dStep(
                a=sel.a,
                b=sel.b,
                block=block,
                block_energy=block_energy,
                residual_energy=residual,
            )
        )
    return record


def reconstruct_product_tm(record, order, oversample=OVERSAMPLE):
    """Partial sum S_n rebuilt from a product-system record."""
    n = len(record.steps)
    out = np.zeros((order + 1, order + 1), dtype=complex)
    if n == 0:
        return FourierCoeffs2D(out, hardy=True)
    rows_a = tm_matrix([s.a for s in record.steps], order, oversample)
    rows_b = tm_matrix([s.b for s in record.steps], order, oversample)
    for step_idx, step in enumerate(record.steps, start=1):
        entries = step.block
        for j in range(step_idx - 1):
            out += entries[j] * np.outer(rows_a[j], rows_b[step_idx - 1])
        for l in range(step_idx):
            out += entries[step_idx - 1 + l] * np.outer(rows_a[step_idx - 1], rows_b[l])
    return FourierCoeffs2D(out, hardy=True)


def pga_step(g, grid):
    """One pure greedy selection over the tensor kernel dictionary.

    Maximizes |<g, e_a (x) e_b>| via the reproducing identity
    sqrt(1 - |a|^2) sqrt(1 - |b|^2) |g(a, b)|, then returns the selected
    tensor atom and its coefficient.
    """
    require_nonzero(g.energy())
    C = _hardy_block(g)
    order = g.order
    powers = np.arange(order + 1)

    def objective(a_pts, b_pts):
        a = np.asarray(a_pts, dtype=complex).ravel()
        b = np.asarray(b_pts, dtype=complex).ravel()
        pa = a[:, None] ** powers[None, :]
        pb = b[:, None] ** powers[None, :]
        vals = np.abs(pa @ C @ pb.T)
        wa = np.sqrt(1.0 - np.abs(a) ** 2)
        wb = np.sqrt(1.0 - np.abs(b) ** 2)
        return (wa[:, None] * wb[None, :]) * vals

    a, b, _ = grid_argmax_pairs(objective, grid)
    spec = TensorAtomSpec.of(a, b)
    coeff = inner_product_2d(g, tensor_atom_coeffs(spec, order))
    return spec, coeff


@dataclass
class PGAStep:
    atom: TensorAtomSpec
    coeff: complex
    residual_energy: float


@dataclass
class PGARecord:
    initial_energy: float
    steps: list[PGAStep] = field(default_factory=list)

    def residual_energies(self):
        return [s.residual_energy for s in self.steps]


def pga_decompose(f, n_terms, grid, threshold=1e-12):
    """Pure greedy decomposition over tensor kernels.

    Iterates g <- g - <g, e_a (x) e_b> e_a (x) e_b; each step removes
    exactly the selected coefficient's energy, so residual energies are
    non-increasing and satisfy the per-step ledger identity.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    require_nonzero(f.energy())
    remainder = f.copy()
    record = PGARecord(initial_energy=f.energy())
    for _ in range(n_terms):
        if remainder.energy() <= threshold * record.initial_energy:
            break
        spec, coeff = pga_step(remainder, grid)
        remainder = remainder - coeff * tensor_atom_coeffs(spec, f.order)
        record.steps.append(
            PGAStep(atom=spec, coeff=coeff, residual_energy=remainder.energy())
        )
    return record


def reconstruct_pga(record, order):
    """Sum of the selected tensor kernels weighted by their coefficients."""
    out = FourierCoeffs2D.zeros(order, hardy=True)
    for step in record.steps:
        out = out + step.coeff * tensor_atom_coeffs(step.atom, order)
    return out
