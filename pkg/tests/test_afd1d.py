"""Rational orthonormal systems, backward shift, 1-d greedy decomposition."""

import numpy as np
import pytest

from afdkit import (
    DegenerateInputError,
    DomainError,
    FourierCoeffs1D,
    GridSpec,
    TruncationError,
    afd_decompose_1d,
    backward_shift,
    blaschke_eval,
    grid_points,
    hyperbolic_diagnostic,
    inner_product_1d,
    msp_1d,
    multiplicities,
    reconstruct_1d,
    szego_coeffs,
    tm_basis,
    tm_matrix,
)
from conftest import dominant_atoms_on_grid, exhaustive_argmax, random_hardy_1d

GRID = GridSpec(radial_count=24, angular_count=48, refine_levels=1, max_radius=0.9)


class TestMultiplicities:
    def test_repeats(self):
        assert multiplicities([0.5, 0.3, 0.5, 0.5]) == [1, 1, 2, 3]

    def test_empty(self):
        assert multiplicities([]) == []


class TestBlaschke:
    def test_empty_product_is_one(self):
        assert np.allclose(blaschke_eval([], 16), 1.0)

    def test_single_zero_at_origin_is_z(self):
        z = np.exp(2j * np.pi * np.arange(16) / 16)
        assert np.allclose(blaschke_eval([0.0], 16), z)

    def test_unimodular(self):
        vals = blaschke_eval([0.5, 0.5], 128)
        assert np.max(np.abs(np.abs(vals) - 1.0)) < 1e-13

    def test_invalid_parameter(self):
        with pytest.raises(DomainError):
            blaschke_eval([1.5], 16)


class TestTMBasis:
    def test_zero_params_give_monomials(self):
        rows = tm_matrix([0, 0, 0, 0], 32)
        assert np.max(np.abs(rows - np.eye(4, 33))) < 1e-14

    def test_first_function_is_kernel(self):
        basis = tm_basis([0.5], 64)
        assert np.max(np.abs(basis[0].data - szego_coeffs(0.5, 64).data)) < 1e-14

    def test_gram_identity(self):
        params = [0.5, 0.3, 0.5 + 0.2j, 0.0, 0.8j]
        rows = tm_matrix(params, 512)
        gram = np.conj(rows) @ rows.T
        assert np.max(np.abs(gram - np.eye(5))) < 1e-8

    def test_repeated_parameters_stay_orthonormal(self):
        rows = tm_matrix([0.6, 0.6, 0.6], 256)
        gram = np.conj(rows) @ rows.T
        assert np.max(np.abs(gram - np.eye(3))) < 1e-10


class TestBackwardShift:
    def test_classical_shift(self):
        f = FourierCoeffs1D.from_terms(16, {2: 1.0}, hardy=True)
        shifted = backward_shift(f, 0.0)
        assert abs(shifted.get(1) - 1.0) < 1e-12
        assert abs(shifted.energy() - 1.0) < 1e-12

    def test_atom_annihilation(self):
        atom = szego_coeffs(0.4 - 0.2j, 128)
        assert backward_shift(atom, 0.4 - 0.2j).energy() < 1e-20

    def test_energy_identity(self):
        f = FourierCoeffs1D.from_terms(256, {1: 1.0}, hardy=True)
        shifted = backward_shift(f, 0.5)
        assert shifted.energy() == pytest.approx(1 - 0.75 * 0.25, abs=1e-10)

    def test_requires_hardy(self):
        with pytest.raises(DomainError):
            backward_shift(FourierCoeffs1D.from_terms(4, {0: 1.0}), 0.1)

    def test_truncation_blowup_detected(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            f = szego_coeffs(0.9, 16)
            with pytest.raises(TruncationError):
                backward_shift(f, 0.97)


class TestMsp:
    def test_atom_recovery(self):
        target = complex(grid_points(GRID)[300])
        a, value = msp_1d(szego_coeffs(target, 256), GRID)
        assert a == pytest.approx(target, abs=1e-14)
        assert value == pytest.approx(1.0, abs=1e-10)

    def test_monomial_prefers_balanced_radius(self):
        f = FourierCoeffs1D.from_terms(256, {1: 1.0}, hardy=True)
        a, value = msp_1d(f, GRID)
        assert abs(abs(a) ** 2 - 0.5) < 0.05
        assert 0.24 < value <= 0.25 + 1e-12

    def test_constant_selects_center(self):
        f = FourierCoeffs1D.from_terms(256, {0: 1.0}, hardy=True)
        a, value = msp_1d(f, GRID)
        assert a == 0 and value == pytest.approx(1.0)

    def test_zero_input_rejected(self):
        with pytest.raises(DegenerateInputError):
            msp_1d(FourierCoeffs1D.zeros(8, hardy=True), GRID)

    @pytest.mark.parametrize("seed", range(5))
    def test_oracle_equivalence(self, seed):
        spec = GridSpec(radial_count=10, angular_count=16, refine_levels=0, max_radius=0.85)
        f = random_hardy_1d(seed, 64)

        def objective(pts):
            vals = np.polynomial.polynomial.polyval(np.asarray(pts), f.data)
            return (1 - np.abs(pts) ** 2) * np.abs(vals) ** 2

        got_a, got_v = msp_1d(f, spec)
        want_a, want_v = exhaustive_argmax(objective, spec)
        assert got_a == want_a and got_v == pytest.approx(want_v, rel=1e-12)


class TestDecompose:
    def test_single_atom_single_step(self):
        target = complex(grid_points(GRID)[500])
        record = afd_decompose_1d(szego_coeffs(target, 256), 5, GRID)
        assert len(record.steps) == 1
        assert record.steps[0].a == pytest.approx(target)
        assert record.steps[0].residual_energy < 1e-12

    def test_two_atom_exact_recovery(self):
        grid = GridSpec(radial_count=48, angular_count=96, refine_levels=2, max_radius=0.95)
        pts = grid_points(grid)
        a1, a2 = complex(pts[4300]), complex(pts[3000])
        f = 0.8 * szego_coeffs(a1, 256) + 0.1 * szego_coeffs(a2, 256)
        record = afd_decompose_1d(f, 2, grid)
        assert sorted([record.steps[0].a, record.steps[1].a], key=abs) == sorted(
            [a1, a2], key=abs
        )
        assert record.steps[-1].residual_energy < 1e-8

    @pytest.mark.parametrize("seed", range(3))
    def test_energy_ledger(self, seed):
        f = random_hardy_1d(seed, 256)
        record = afd_decompose_1d(f, 8, GRID)
        prev = record.initial_energy
        for step in record.steps:
            assert abs(prev - step.residual_energy - abs(step.coeff) ** 2) < 1e-10
            assert step.residual_energy < prev
            prev = step.residual_energy

    @pytest.mark.parametrize("seed", range(3))
    def test_coefficients_match_orthonormal_system(self, seed):
        f = random_hardy_1d(seed, 256)
        record = afd_decompose_1d(f, 6, GRID)
        basis = tm_basis(record.params(), 256)
        for step, b in zip(record.steps, basis):
            assert abs(step.coeff - inner_product_1d(f, b)) < 1e-8

    @pytest.mark.parametrize("seed", range(2))
    def test_remainder_relation(self, seed):
        """Orthogonal remainder equals the shifted remainder times the Blaschke prefix."""
        f = random_hardy_1d(seed, 256)
        record = afd_decompose_1d(f, 5, GRID)
        params = record.params()
        basis = tm_basis(params, 256)
        size = 2048
        fk = f.copy()
        for k in range(1, len(params) + 1):
            fk = backward_shift(fk, params[k - 1])
            g = f.copy()
            for j in range(k):
                g = g - inner_product_1d(f, basis[j]) * basis[j]
            lhs = g.boundary_samples(size)
            rhs = fk.boundary_samples(size) * blaschke_eval(params[:k], size)
            err = np.sqrt(np.mean(np.abs(lhs - rhs) ** 2))
            assert err < 1e-7

    def test_rate_bound_bounded_synthesis(self):
        from afdkit.cli import synth_signal_1d

        f, _, _ = synth_signal_1d(256, 10, 2.0, GRID, seed=5)
        record = afd_decompose_1d(f, 15, GRID)
        d = [record.initial_energy] + record.residual_energies()
        for k in range(1, len(d) + 1):
            assert np.sqrt(d[k - 1]) <= 2.0 / np.sqrt(k) + 1e-12

    def test_stops_at_threshold(self):
        target = complex(grid_points(GRID)[200])
        record = afd_decompose_1d(szego_coeffs(target, 128), 10, GRID)
        assert len(record.steps) == 1


class TestReconstruct:
    def test_single_atom(self):
        target = complex(grid_points(GRID)[450])
        atom = szego_coeffs(target, 128)
        record = afd_decompose_1d(atom, 1, GRID)
        recon = reconstruct_1d(record, 128)
        assert np.max(np.abs(recon.data - atom.data)) < 1e-10

    def test_two_atom_reconstruction(self):
        grid = GridSpec(radial_count=48, angular_count=96, refine_levels=2, max_radius=0.95)
        pts = grid_points(grid)
        f = 0.8 * szego_coeffs(complex(pts[4300]), 256) + 0.1 * szego_coeffs(
            complex(pts[3000]), 256
        )
        record = afd_decompose_1d(f, 2, grid)
        recon = reconstruct_1d(record, 256)
        assert (f - recon).norm() < 1e-7

    def test_five_atom_recovery(self):
        grid = GridSpec(radial_count=48, angular_count=96, refine_levels=2, max_radius=0.95)
        f, _, _ = dominant_atoms_on_grid(3, grid, 256, 5)
        record = afd_decompose_1d(f, 5, grid)
        recon = reconstruct_1d(record, 256)
        assert (f - recon).norm() / f.norm() < 1e-6

    @pytest.mark.parametrize("seed", range(2))
    def test_difference_is_the_remainder(self, seed):
        f = random_hardy_1d(seed, 256)
        record = afd_decompose_1d(f, 6, GRID)
        recon = reconstruct_1d(record, 256)
        assert (f - recon).energy() == pytest.approx(
            record.steps[-1].residual_energy, abs=1e-8
        )


class TestHyperbolicDiagnostic:
    def test_zeros(self):
        assert hyperbolic_diagnostic([0] * 5) == pytest.approx(5.0)

    def test_near_boundary(self):
        assert hyperbolic_diagnostic([0.9, 0.99, 0.999]) == pytest.approx(0.111)

    def test_empty(self):
        assert hyperbolic_diagnostic([]) == 0.0
