"""Pre-orthogonal greedy selection, escalation, rates, and the 1-d equivalence."""

import numpy as np
import pytest

from afdkit import (
    AtomSpec,
    DegenerateInputError,
    GridSpec,
    OrthoFrame,
    ProductSzegoDictionary2D,
    SpanDegeneracyError,
    SzegoDictionary1D,
    TensorAtomSpec,
    afd_decompose_1d,
    candidate_gain,
    grid_points,
    multiplicities,
    normalized_atom_coeffs,
    oga_select,
    poga_decompose,
    poga_select,
    project_residual,
    rate_report,
    reconstruct_poga,
    szego_coeffs,
    tensor_atom_coeffs,
)
from afdkit.poga import _select
from conftest import kernel_ip, random_hardy_1d, random_hardy_2d

ORDER = 256
GRID = GridSpec(radial_count=24, angular_count=48, refine_levels=0, max_radius=0.9)


@pytest.fixture(scope="module")
def dict1d():
    return SzegoDictionary1D(ORDER, GRID)


def kernel_frame(params, order=ORDER):
    frame = OrthoFrame(order + 1)
    for a in params:
        frame.extend(szego_coeffs(a, order).data, spec=AtomSpec(a))
    return frame


class TestProjectResidual:
    def test_empty_frame_is_identity(self):
        frame = OrthoFrame(ORDER + 1)
        x = szego_coeffs(0.3, ORDER).data
        res, r = project_residual(frame, x)
        assert np.allclose(res, x) and r == pytest.approx(np.linalg.norm(x))

    def test_basis_vector_has_zero_residual(self):
        frame = kernel_frame([0.5])
        _, r = project_residual(frame, frame.matrix[0])
        assert r < 1e-12

    def test_kernel_pair_pythagoras(self):
        frame = kernel_frame([0.5])
        _, r = project_residual(frame, szego_coeffs(0.3, ORDER).data)
        expected_sq = 1.0 - abs(kernel_ip(0.3, 0.5)) ** 2
        assert r**2 == pytest.approx(expected_sq, abs=1e-10)
        assert r**2 == pytest.approx(0.05536332179930796, abs=1e-10)

    def test_residual_orthogonal_to_frame(self):
        frame = kernel_frame([0.5, 0.2 - 0.4j, 0.7j])
        res, _ = project_residual(frame, szego_coeffs(0.1 + 0.1j, ORDER).data)
        assert np.max(np.abs(np.conj(frame.matrix) @ res)) < 1e-10


class TestCandidateGain:
    def test_empty_frame_gain_is_raw_inner_product(self):
        frame = OrthoFrame(ORDER + 1)
        g = random_hardy_1d(0, ORDER).data
        atom = szego_coeffs(0.4, ORDER).data
        out = candidate_gain(g, atom, frame)
        raw = abs(np.vdot(atom, g))
        assert out.gain == pytest.approx(raw, rel=1e-10)
        assert out.r == pytest.approx(1.0, abs=1e-10)

    def test_in_span_signals_degeneracy(self):
        frame = kernel_frame([0.5])
        with pytest.raises(SpanDegeneracyError):
            candidate_gain(random_hardy_1d(1, ORDER).data, szego_coeffs(0.5, ORDER).data, frame)

    def test_against_two_step_gram_schmidt_oracle(self):
        frame = kernel_frame([0.5])
        g = project_residual(frame, szego_coeffs(0.7, ORDER).data)[0]
        atom = szego_coeffs(0.3, ORDER).data
        out = candidate_gain(g, atom, frame)
        # oracle: orthonormalize the atom explicitly, then take the inner product
        res, r = project_residual(frame, atom)
        oracle = abs(np.vdot(res / r, g))
        assert out.gain == pytest.approx(oracle, rel=1e-10)

    def test_gain_identities(self):
        frame = kernel_frame([0.5, -0.3j])
        g = project_residual(frame, random_hardy_1d(2, ORDER).data)[0]
        for a in (0.2, 0.6j, -0.4 + 0.3j):
            out = candidate_gain(g, szego_coeffs(a, ORDER).data, frame)
            raw = abs(np.vdot(szego_coeffs(a, ORDER).data, g))
            assert out.gain * out.r == pytest.approx(raw, abs=1e-10)
            assert out.gain >= raw - 1e-12


class TestOrthoFrame:
    def test_near_parallel_atoms_stay_orthonormal(self):
        frame = OrthoFrame(ORDER + 1)
        for a in np.linspace(0.30, 0.70, 9):
            frame.extend(szego_coeffs(a, ORDER).data, spec=AtomSpec(a))
        assert frame.gram_defect() < 1e-9

    def test_extend_rejects_span_members(self):
        frame = kernel_frame([0.5])
        with pytest.raises(SpanDegeneracyError):
            frame.extend(szego_coeffs(0.5, ORDER).data)

    def test_reorthogonalize_preserves_span(self):
        frame = kernel_frame([0.5, 0.3, -0.2j])
        before = frame.matrix.copy()
        frame.reorthogonalize()
        sol, *_ = np.linalg.lstsq(frame.matrix.T, before.T, rcond=None)
        assert np.max(np.abs(frame.matrix.T @ sol - before.T)) < 1e-10


class TestDictionaryScan:
    def test_1d_scan_matches_candidate_gain(self, dict1d):
        frame = kernel_frame([0.4, -0.5j])
        g = project_residual(frame, random_hardy_1d(3, ORDER).data)[0]
        inner, r = dict1d.scan(g, frame)
        rng = np.random.default_rng(0)
        for i in rng.choice(len(dict1d), size=25, replace=False):
            atom = szego_coeffs(complex(dict1d.params[i]), ORDER).data
            res, r_direct = project_residual(frame, atom)
            assert r[i] == pytest.approx(r_direct, abs=1e-9)
            assert inner[i] == pytest.approx(abs(np.vdot(atom, g)), abs=1e-12)

    def test_2d_scan_matches_direct(self):
        order = 24
        grid = GridSpec(radial_count=4, angular_count=8, refine_levels=0, max_radius=0.5)
        d2 = ProductSzegoDictionary2D(order, grid)
        frame = OrthoFrame(d2.dim)
        frame.extend(d2.atom_vector(d2.base_spec(7)), spec=d2.base_spec(7))
        g = random_hardy_2d(4, order).data.ravel()
        g, _ = project_residual(frame, g)
        inner, r = d2.scan(g, frame)
        rng = np.random.default_rng(1)
        for i in rng.choice(len(d2), size=20, replace=False):
            vec = d2.atom_vector(d2.base_spec(int(i)))
            _, r_direct = project_residual(frame, vec)
            assert r[i] == pytest.approx(r_direct, abs=1e-9)
            assert inner[i] == pytest.approx(abs(np.vdot(vec, g)), abs=1e-12)


class TestPogaSelect:
    def test_atom_recovery(self, dict1d):
        a0 = complex(grid_points(GRID)[700])
        frame = OrthoFrame(ORDER + 1)
        out = poga_select(szego_coeffs(a0, ORDER).data, frame, dict1d)
        assert out.atom == AtomSpec(a0, 1)
        assert out.gain == pytest.approx(1.0, abs=1e-9)

    def test_escalates_to_second_order(self, dict1d):
        a0 = complex(grid_points(GRID)[500])
        f = 1.0 * normalized_atom_coeffs(AtomSpec(a0, 1), ORDER) + 0.05 * normalized_atom_coeffs(
            AtomSpec(a0, 2), ORDER
        )
        record = poga_decompose(f.data, 2, dict1d)
        assert [s.atom for s in record.steps] == [AtomSpec(a0, 1), AtomSpec(a0, 2)]
        assert record.steps[-1].residual_energy < 1e-16

    def test_weak_selection_inequality(self, dict1d):
        g = random_hardy_1d(5, ORDER).data
        frame = kernel_frame([0.3])
        g, _ = project_residual(frame, g)
        _, sup_gain, _ = _select(g, frame, dict1d, 1.0)
        out = poga_select(g, frame, dict1d, rho=0.5)
        assert out.gain >= 0.5 * sup_gain

    def test_weak_selection_prefers_small_r(self, dict1d):
        g = random_hardy_1d(6, ORDER).data
        frame = kernel_frame([0.3])
        g, _ = project_residual(frame, g)
        out_full = poga_select(g, frame, dict1d, rho=1.0)
        out_weak = poga_select(g, frame, dict1d, rho=0.3)
        assert out_weak.r <= out_full.r + 1e-12

    def test_zero_remainder_rejected(self, dict1d):
        with pytest.raises(DegenerateInputError):
            poga_select(np.zeros(ORDER + 1, dtype=complex), OrthoFrame(ORDER + 1), dict1d)

    def test_2d_escalation_raises_one_factor(self):
        order = 32
        grid = GridSpec(radial_count=8, angular_count=16, refine_levels=0, max_radius=0.6)
        d2 = ProductSzegoDictionary2D(order, grid)
        a0 = complex(grid_points(grid)[40])
        b0 = complex(grid_points(grid)[77])
        base = tensor_atom_coeffs(TensorAtomSpec.of(a0, b0), order)
        bumped = tensor_atom_coeffs(TensorAtomSpec(AtomSpec(a0, 2), AtomSpec(b0, 1)), order)
        f = 1.0 * base + 0.03 * bumped
        record = poga_decompose(f.data.ravel(), 2, d2)
        orders = [(s.atom.left.m, s.atom.right.m) for s in record.steps]
        assert orders == [(1, 1), (2, 1)]
        assert record.steps[-1].residual_energy < 1e-16


class TestOgaBaseline:
    def test_atom_recovery(self, dict1d):
        a0 = complex(grid_points(GRID)[321])
        pick = oga_select(szego_coeffs(a0, ORDER).data, dict1d)
        assert pick == AtomSpec(a0, 1)

    def test_equals_exhaustive_scan(self, dict1d):
        g = random_hardy_1d(7, ORDER).data
        pick = oga_select(g, dict1d)
        vals = [
            abs(np.vdot(szego_coeffs(complex(p), ORDER).data, g)) for p in dict1d.params
        ]
        assert pick.a == complex(dict1d.params[int(np.argmax(vals))])

    @pytest.mark.parametrize("seed", range(5))
    def test_per_step_dominance(self, seed, dict1d):
        f = random_hardy_1d(seed + 50, ORDER)
        frame = kernel_frame([0.4, -0.3 + 0.2j])
        g, _ = project_residual(frame, f.data)
        _, sup_gain, _ = _select(g, frame, dict1d, 1.0)
        pick = oga_select(g, dict1d)
        orthogonalized = candidate_gain(g, szego_coeffs(pick.a, ORDER).data, frame)
        assert sup_gain >= orthogonalized.gain - 1e-12


class TestPogaDecompose:
    def test_single_atom_single_step(self, dict1d):
        a0 = complex(grid_points(GRID)[200])
        record = poga_decompose(szego_coeffs(a0, ORDER).data, 5, dict1d)
        assert len(record.steps) == 1
        assert record.steps[0].residual_energy < 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_energy_ledger(self, seed, dict1d):
        f = random_hardy_1d(seed + 60, ORDER)
        record = poga_decompose(f.data, 8, dict1d)
        d = [record.initial_energy] + record.residual_energies()
        for i, step in enumerate(record.steps):
            assert abs(d[i] - d[i + 1] - abs(step.coeff) ** 2) < 1e-10
        assert record.frame.gram_defect() < 1e-9

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_classic_decomposition(self, seed, dict1d):
        """Pre-orthogonal selection over the complete kernel dictionary
        reproduces the backward-shift greedy loop step for step."""
        f = random_hardy_1d(seed + 70, ORDER)
        rec_bs = afd_decompose_1d(f, 8, GRID)
        rec_po = poga_decompose(f.data, 8, dict1d)
        assert [s.atom.a for s in rec_po.steps] == rec_bs.params()
        assert [s.atom.m for s in rec_po.steps] == multiplicities(rec_bs.params())
        for s1, s2 in zip(rec_bs.steps, rec_po.steps):
            assert abs(abs(s1.coeff) - abs(s2.coeff)) < 1e-8
            assert abs(s1.residual_energy - s2.residual_energy) < 1e-8

    def test_reconstruction_matches_remainder(self, dict1d):
        f = random_hardy_1d(90, ORDER)
        record = poga_decompose(f.data, 6, dict1d)
        recon = reconstruct_poga(record, dict1d)
        assert np.linalg.norm(f.data - recon) ** 2 == pytest.approx(
            record.steps[-1].residual_energy, abs=1e-8
        )


class TestRateReport:
    def test_orthogonal_selection_bound_reduces(self):
        """When every candidate stays orthogonal to the frame (r = 1
        throughout), the bound is plain M / sqrt(m)."""
        from afdkit.poga import PogaRecord, PogaStep

        coeffs = np.array([1.0, 0.5, 0.3, 0.2])
        M = float(np.sum(coeffs))
        energy = float(np.sum(coeffs**2))
        record = PogaRecord(initial_energy=energy, rho=1.0)
        remaining = energy
        for m, c in enumerate(sorted(coeffs)[::-1], start=1):
            remaining -= c * c
            record.steps.append(
                PogaStep(
                    atom=AtomSpec(0.0, m),
                    coeff=complex(c),
                    r=1.0,
                    r_sup=1.0,
                    residual_energy=remaining,
                )
            )
        report = rate_report(record, M)
        for row in report.rows:
            assert row.bound == pytest.approx(M / np.sqrt(row.m), rel=1e-12)
            assert row.slack >= 0
        assert report.ok

    def test_running_max_pins_bound_at_one(self, dict1d):
        """The first scan sees an empty frame, so the running residual-norm
        maximum is 1 and real runs inherit the M / sqrt(m) bound."""
        specs = [AtomSpec(0.0, m) for m in range(1, 5)]
        coeffs = np.array([1.0, 0.5, 0.3, 0.2])
        f = np.zeros(ORDER + 1, dtype=complex)
        for c, s in zip(coeffs, specs):
            f += c * normalized_atom_coeffs(s, ORDER).data
        record = poga_decompose(f, 4, dict1d, synthesis=specs)
        assert all(abs(v - 1.0) < 1e-9 for v in record.r_max_values())
        report = rate_report(record, float(np.sum(coeffs)))
        assert report.ok

    @pytest.mark.parametrize("rho", [1.0, 0.7])
    def test_synthetic_runs_meet_bound(self, rho, dict1d):
        from afdkit.cli import synth_signal_1d

        for seed in range(3):
            f, params, _ = synth_signal_1d(ORDER, 10, 2.0, GRID, seed)
            record = poga_decompose(
                f.data, 15, dict1d, rho=rho, synthesis=[AtomSpec(a) for a in params]
            )
            report = rate_report(record, 2.0)
            assert report.ok
            assert all(row.slack >= 0 for row in report.rows)
            assert report.recurrence_ok and report.conclusion_ok

    def test_violation_detected(self, dict1d):
        from afdkit.cli import synth_signal_1d

        f, params, _ = synth_signal_1d(ORDER, 6, 2.0, GRID, 9)
        record = poga_decompose(f.data, 6, dict1d, synthesis=[AtomSpec(a) for a in params])
        record.steps[2].residual_energy = record.initial_energy * 4.0
        report = rate_report(record, 2.0)
        assert not report.ok
