import itertools
import math

import numpy as np
import pytest

from spin2oam.hilbert import OAM_B_CIRCULAR, DensityMatrix, Ket
from spin2oam.tomography import (
    BASIS_PAIRS,
    MUB_LABELS,
    MUB_STATE_VECTORS,
    CountRecord,
    density_matrix_from_json,
    density_matrix_to_json,
    fidelity,
    mle_reconstruct,
    mub_projectors,
    simulate_counts,
    table_inputs,
    tomography_report,
    trace_distance,
    write_counts_csv,
    write_report_csv,
)
from conftest import oam_ket


def bloch_grid_argmax(counts, resolution=1e-3):
    """Brute-force pure-state maximizer of sum_i n_i log p_i on the Bloch sphere.

    Independent of the fixed-point solver: probabilities come straight from
    the Bloch components, p = (1 +/- {z, x, y})/2 for {h/v, d/a, l/r}.
    """
    n = np.array([c.count for c in counts], dtype=float)
    thetas = np.arange(0.0, math.pi + resolution, resolution)
    phis = np.arange(0.0, 2 * math.pi, resolution)
    cos_phi, sin_phi = np.cos(phis), np.sin(phis)
    best_value, best_vector = -np.inf, None
    tiny = 1e-300
    for start in range(0, len(thetas), 64):
        block = thetas[start : start + 64]
        z = np.cos(block)[:, None]
        sin_t = np.sin(block)[:, None]
        x = sin_t * cos_phi[None, :]
        y = sin_t * sin_phi[None, :]
        ll = np.zeros_like(x)
        for count, axis in zip(n, (z, -z, x, -x, y, -y)):
            if count > 0:
                ll = ll + count * np.log(np.maximum((1 + axis) / 2, tiny))
        flat = np.argmax(ll)
        if ll.ravel()[flat] > best_value:
            best_value = ll.ravel()[flat]
            i, j = np.unravel_index(flat, ll.shape)
            best_vector = np.array([x[i, j], y[i, j] if y.shape == x.shape else y[i, j], z[i, 0]])
    x_, y_, z_ = best_vector
    rho = 0.5 * np.array([[1 + z_, x_ - 1j * y_], [x_ + 1j * y_, 1 - z_]])
    return rho


def pure_density(label):
    vec = MUB_STATE_VECTORS[label]
    return DensityMatrix(np.outer(vec, vec.conj()))


MIXED = DensityMatrix(np.eye(2) / 2)


class TestProjectors:
    def test_mub_overlap(self):
        overlap = abs(np.vdot(MUB_STATE_VECTORS["h"], MUB_STATE_VECTORS["d"])) ** 2
        assert overlap == pytest.approx(0.5, abs=1e-12)

    def test_completeness_per_basis(self):
        ps = mub_projectors(2)
        for a, b in BASIS_PAIRS:
            np.testing.assert_allclose(
                ps.projector(a) + ps.projector(b), np.eye(2), atol=1e-12
            )

    def test_all_pairwise_overlaps(self):
        # 3 same-basis pairs are orthogonal; the 12 cross-basis pairs all at 1/2
        basis_of = {label: i for i, pair in enumerate(BASIS_PAIRS) for label in pair}
        for a, b in itertools.combinations(MUB_LABELS, 2):
            overlap = abs(np.vdot(MUB_STATE_VECTORS[a], MUB_STATE_VECTORS[b])) ** 2
            expected = 0.0 if basis_of[a] == basis_of[b] else 0.5
            assert overlap == pytest.approx(expected, abs=1e-12), (a, b)

    def test_projector_properties(self):
        ps = mub_projectors(1)
        for mat in ps.projectors:
            np.testing.assert_allclose(mat, mat.conj().T, atol=1e-12)
            np.testing.assert_allclose(mat @ mat, mat, atol=1e-12)

    def test_ell_domain(self):
        with pytest.raises(ValueError):
            mub_projectors(0)


class TestSimulateCounts:
    def test_h_noiseless_expectations(self):
        counts = simulate_counts(oam_ket("h"), shots=1000, noiseless=True)
        values = [c.count for c in counts]
        np.testing.assert_allclose(values, [1000, 0, 500, 500, 500, 500], atol=1e-9)

    def test_maximally_mixed_noiseless(self):
        counts = simulate_counts(MIXED, shots=800, noiseless=True)
        np.testing.assert_allclose([c.count for c in counts], 400, atol=1e-9)

    def test_circular_input_accepted(self):
        plus = Ket((OAM_B_CIRCULAR,), np.array([1, 0], dtype=complex), ell=2)
        counts = simulate_counts(plus, shots=100, noiseless=True)
        values = {c.label: c.count for c in counts}
        assert values["l"] == pytest.approx(100, abs=1e-9)
        assert values["r"] == pytest.approx(0, abs=1e-9)

    def test_deterministic(self):
        a = simulate_counts(oam_ket("d"), shots=5000, seed=77)
        b = simulate_counts(oam_ket("d"), shots=5000, seed=77)
        assert [c.count for c in a] == [c.count for c in b]
        assert all(isinstance(c.count, int) for c in a)

    def test_shots_domain(self):
        with pytest.raises(ValueError):
            simulate_counts(oam_ket("h"), shots=0)


class TestMleReconstruct:
    def test_noiseless_h_consistent(self):
        counts = simulate_counts(oam_ket("h"), shots=10_000, noiseless=True)
        result = mle_reconstruct(counts)
        assert result.converged
        assert trace_distance(result.rho, pure_density("h")) <= 1e-6

    def test_noiseless_h_matches_grid_oracle(self):
        counts = simulate_counts(oam_ket("h"), shots=10_000, noiseless=True)
        result = mle_reconstruct(counts)
        oracle = bloch_grid_argmax(counts)
        assert trace_distance(result.rho, oracle) <= 2e-3

    def test_noiseless_l_matches_grid_oracle(self):
        # (h + i v)/sqrt2: complex off-diagonal exercised
        counts = simulate_counts(oam_ket("l"), shots=10_000, noiseless=True)
        result = mle_reconstruct(counts)
        assert trace_distance(result.rho, pure_density("l")) <= 1e-6
        oracle = bloch_grid_argmax(counts)
        assert trace_distance(result.rho, oracle) <= 2e-3

    def test_equal_counts_give_mixed_state(self):
        counts = [CountRecord(label, 600, 100) for label in MUB_LABELS]
        result = mle_reconstruct(counts)
        assert trace_distance(result.rho, MIXED) <= 1e-6

    def test_all_zero_counts_rejected(self):
        counts = [CountRecord(label, 10, 0) for label in MUB_LABELS]
        with pytest.raises(ValueError, match="zero"):
            mle_reconstruct(counts)

    def test_monotone_history(self):
        counts = simulate_counts(oam_ket("a"), shots=2000, seed=5)
        result = mle_reconstruct(counts)
        assert np.all(np.diff(result.history) >= 0.0)

    def test_nonconvergence_flagged(self):
        counts = simulate_counts(oam_ket("d"), shots=2000, seed=6)
        result = mle_reconstruct(counts, max_iterations=2)
        assert not result.converged
        assert result.iterations == 2

    def test_physicality_under_noise(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            vec = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            vec /= np.linalg.norm(vec)
            state = DensityMatrix(np.outer(vec, vec.conj()))
            counts = simulate_counts(state, shots=500, seed=int(rng.integers(2**63)))
            rho = mle_reconstruct(counts).rho.matrix
            assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
            assert abs(np.trace(rho).real - 1.0) <= 1e-12
            assert np.linalg.eigvalsh(rho).min() >= -1e-10

    def test_noiseless_consistency_sweep(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            vec = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            vec /= np.linalg.norm(vec)
            truth = DensityMatrix(np.outer(vec, vec.conj()))
            counts = simulate_counts(truth, shots=10_000, noiseless=True)
            result = mle_reconstruct(counts)
            assert trace_distance(result.rho, truth) <= 1e-6

    def test_multinomial_same_maximizer(self):
        counts = simulate_counts(oam_ket("d"), shots=4000, seed=17)
        rho_p = mle_reconstruct(counts, likelihood="poisson").rho
        rho_m = mle_reconstruct(counts, likelihood="multinomial").rho
        assert trace_distance(rho_p, rho_m) <= 1e-9

    def test_unknown_likelihood(self):
        counts = simulate_counts(oam_ket("d"), shots=100, seed=1)
        with pytest.raises(ValueError):
            mle_reconstruct(counts, likelihood="gaussian")


class TestFidelity:
    def test_identity(self):
        for label in MUB_LABELS:
            assert fidelity(pure_density(label), pure_density(label)) == pytest.approx(
                1.0, abs=1e-10
            )

    def test_orthogonal_pure_states(self):
        assert fidelity(pure_density("h"), pure_density("v")) == pytest.approx(0.0, abs=1e-10)

    def test_pure_vs_mixed(self):
        assert fidelity(pure_density("h"), MIXED) == pytest.approx(0.5, abs=1e-10)

    def test_symmetric(self, rng):
        for _ in range(50):
            a, b = _random_density(rng), _random_density(rng)
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)

    def test_pure_reduction(self, rng):
        for _ in range(20):
            vec = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            vec /= np.linalg.norm(vec)
            pure = DensityMatrix(np.outer(vec, vec.conj()))
            sigma = _random_density(rng)
            direct = float((vec.conj() @ sigma.matrix @ vec).real)
            assert fidelity(pure, sigma) == pytest.approx(direct, abs=1e-10)

    def test_bounds_random_pairs(self):
        rng = np.random.default_rng(13)
        for _ in range(1000):
            a, b = _random_density(rng), _random_density(rng)
            value = fidelity(a, b)
            assert 0.0 <= value <= 1.0
            if trace_distance(a, b) >= 1e-4:
                assert value < 1.0

    def test_non_psd_rejected(self):
        bad = np.array([[1.2, 0], [0, -0.2]])
        with pytest.raises(ValueError):
            fidelity(bad, MIXED)


def _random_density(rng):
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


class TestTraceDistance:
    def test_orthogonal(self):
        assert trace_distance(pure_density("h"), pure_density("v")) == pytest.approx(1.0)

    def test_zero(self):
        assert trace_distance(MIXED, MIXED) == pytest.approx(0.0)


class TestReport:
    def test_noiseless_all_ones(self):
        reports = tomography_report(table_inputs(), ell=2, shots=10_000, trials=5, noiseless=True)
        assert [r.label for r in reports] == ["L", "V", "D", "H", "A", "R"]
        for report in reports:
            assert report.f_mean == pytest.approx(1.0, abs=1e-6)
            assert report.f_std == 0.0
            assert report.trials == 1

    def test_deterministic(self):
        a = tomography_report([("D", math.pi / 2, 0.0)], ell=2, shots=300, trials=4, seed=3)
        b = tomography_report([("D", math.pi / 2, 0.0)], ell=2, shots=300, trials=4, seed=3)
        assert a[0].f_mean == b[0].f_mean
        assert a[0].f_std == b[0].f_std

    def test_fidelity_improves_with_shots(self):
        # mean fidelity over 100 trials is non-decreasing across the sweep
        means = []
        for shots in (100, 1000, 10_000):
            reports = tomography_report(
                [("D", math.pi / 2, 0.0)], ell=2, shots=shots, trials=100, seed=21
            )
            means.append(reports[0].f_mean)
        assert means[0] <= means[1] <= means[2]
        assert means[2] >= 0.99

    def test_trials_domain(self):
        with pytest.raises(ValueError):
            tomography_report(table_inputs(), ell=2, shots=10, trials=0)


class TestSerialization:
    def test_counts_csv(self, tmp_path):
        counts = simulate_counts(oam_ket("h"), shots=100, seed=2)
        path = write_counts_csv(tmp_path / "counts.csv", {"H": counts})
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "label,projector,shots,count"
        assert len(lines) == 7
        assert lines[1].startswith("H,h,100,")

    def test_report_csv(self, tmp_path):
        reports = tomography_report(table_inputs(), ell=2, shots=100, trials=2, noiseless=True)
        path = write_report_csv(tmp_path / "report.csv", reports)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "label,gamma,delta,F_mean,F_std,trials,N"
        assert len(lines) == 7
        assert lines[1].startswith("L,")
        assert ",1.000000,0.000000," in lines[1]

    def test_density_matrix_json_roundtrip(self, rng):
        rho = _random_density(rng)
        text = density_matrix_to_json(rho)
        nested = __import__("json").loads(text)
        assert len(nested) == 2 and len(nested[0]) == 2 and len(nested[0][0]) == 2
        restored = density_matrix_from_json(text)
        assert trace_distance(rho, restored) <= 1e-12
