import numpy as np
import pytest
from hypothesis import given, strategies as st

from adaptqaoa import sim
from adaptqaoa.ansatz import AnsatzProgram, Reference, standard_qaoa
from adaptqaoa.entanglement import (
    Bipartition, LogBase, average_single_qubit_entropy, entanglement_spectrum, entropy,
    haar_baseline, middle_cut, page_entropy, project_qubit, schmidt_coefficients,
    spectrum_sample, symmetry_preserving_entropy, symmetry_preserving_single_qubit_entropy,
)
from adaptqaoa.problem import build_hamiltonian, generate_instance
from adaptqaoa.sim import QuantumState

import oracles

seeds = st.integers(0, 2**32 - 1)


def ghz(n):
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 2**-0.5
    return QuantumState(n, v)


def w3():
    v = np.zeros(8, dtype=complex)
    v[[1, 2, 4]] = 3**-0.5
    return QuantumState(3, v)


def rand_state(n, seed):
    return QuantumState(n, oracles.random_state(n, np.random.default_rng(seed)))


def bell_pairs(k):
    """Qubit q paired with q + k, so the middle cut crosses k Bell pairs."""
    n = 2 * k
    v = np.zeros(2**n, dtype=complex)
    for low in range(2**k):
        v[low | (low << k)] = 1
    return QuantumState(n, v / np.linalg.norm(v))


class TestBipartition:
    def test_complement(self):
        assert Bipartition((2, 0), 4).subsystem_b == (1, 3)

    @pytest.mark.parametrize("a", [(), (0, 1, 2), (5,)])
    def test_invalid(self, a):
        with pytest.raises(sim.ContractError):
            Bipartition(a, 3)

    def test_middle(self):
        assert middle_cut(6).subsystem_a == (0, 1, 2)


class TestSchmidt:
    def test_product(self):
        s = schmidt_coefficients(sim.init_plus_state(4), middle_cut(4))
        np.testing.assert_allclose(s, [1, 0, 0, 0], atol=1e-12)

    def test_bell(self):
        np.testing.assert_allclose(schmidt_coefficients(ghz(2), middle_cut(2)), [2**-0.5] * 2)

    @pytest.mark.parametrize("a", [(0,), (1,), (2,), (0, 2)])
    def test_against_partial_trace(self, a):
        psi = rand_state(3, 5)
        rho = oracles.reduced_density_matrix(psi.amplitudes, 3, list(a))
        lam = np.sort(np.linalg.eigvalsh(rho))[::-1]
        s = schmidt_coefficients(psi, Bipartition(a, 3))
        np.testing.assert_allclose(s**2, lam[: s.size], atol=1e-10)

    @given(seeds)
    def test_normalized(self, seed):
        s = schmidt_coefficients(rand_state(5, seed), Bipartition((1, 3), 5))
        assert np.sum(s**2) == pytest.approx(1, abs=1e-9)


class TestEntropy:
    def test_product(self):
        assert entropy(sim.init_plus_state(4), middle_cut(4)) == 0

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_ghz_one_bit(self, n):
        for a in [(0,), tuple(range(n // 2)), (n - 1,)]:
            assert entropy(ghz(n), Bipartition(a, n)) == pytest.approx(1)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_maximal(self, k):
        assert entropy(bell_pairs(k), middle_cut(2 * k)) == pytest.approx(k)

    def test_natural_base(self):
        assert entropy(ghz(3), middle_cut(3), LogBase.NATURAL) == pytest.approx(np.log(2))

    @given(seeds, st.integers(1, 4))
    def test_symmetric(self, seed, size):
        psi = rand_state(5, seed)
        cut = Bipartition(tuple(range(size)), 5)
        assert entropy(psi, cut) == pytest.approx(entropy(psi, cut.swapped()), abs=1e-10)

    @given(seeds, st.floats(-4, 4), st.sampled_from(["X", "Y", "Z"]), st.integers(0, 2))
    def test_local_unitary_invariance(self, seed, angle, axis, q):
        psi = rand_state(6, seed)
        rotated = sim.apply_pauli_rotation(psi, sim.PauliTerm(((q, axis),)), angle)
        assert entropy(rotated, middle_cut(6)) == pytest.approx(entropy(psi, middle_cut(6)), abs=1e-10)

    @given(seeds)
    def test_bounded(self, seed):
        assert entropy(rand_state(5, seed), Bipartition((0, 1), 5)) <= 2 + 1e-12


class TestSingleQubitAverage:
    def test_product(self):
        assert average_single_qubit_entropy(sim.init_symmetry_broken_state(4)) == 0

    def test_ghz(self):
        assert average_single_qubit_entropy(ghz(4)) == pytest.approx(1)

    def test_w_state(self):
        expected = np.log2(3) - 2 / 3 * np.log2(2)
        assert average_single_qubit_entropy(w3()) == pytest.approx(expected)
        assert average_single_qubit_entropy(w3(), LogBase.NATURAL) == pytest.approx(np.log(3) - 2 / 3 * np.log(2))

    def test_needs_two_qubits(self):
        with pytest.raises(sim.ContractError):
            average_single_qubit_entropy(sim.init_plus_state(1))


class TestProjection:
    def test_plus_factor(self):
        inner = rand_state(2, 3)
        psi = QuantumState(3, np.kron(inner.amplitudes, [2**-0.5, 2**-0.5]))
        for outcome in (0, 1):
            post, p = project_qubit(psi, 0, outcome)
            assert p == pytest.approx(0.5)
            expected = np.zeros(8, dtype=complex)
            expected[outcome::2] = inner.amplitudes
            np.testing.assert_allclose(post.amplitudes, expected, atol=1e-12)

    def test_ghz(self):
        post, p = project_qubit(ghz(3), 0, 0)
        assert p == pytest.approx(0.5)
        np.testing.assert_allclose(post.amplitudes, sim.basis_state(3, 0).amplitudes, atol=1e-12)

    def test_zero_probability(self):
        with pytest.raises(sim.ContractError):
            project_qubit(sim.basis_state(3, 0), 0, 1)

    @given(seeds, st.integers(0, 3))
    def test_probabilities_sum_to_one(self, seed, q):
        psi = rand_state(4, seed)
        assert project_qubit(psi, q, 0)[1] + project_qubit(psi, q, 1)[1] == pytest.approx(1, abs=1e-10)


class TestSymmetryPreserving:
    def test_ghz_zero(self):
        for a in [(0,), (0, 1), (1,), (2, 3)]:
            assert symmetry_preserving_entropy(ghz(4), Bipartition(a, 4)) == pytest.approx(0, abs=1e-12)

    def test_unentangled_qubit_changes_nothing(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)  # on qubits 1, 2
        psi = QuantumState(3, np.kron(bell, [1, 0]))
        cut = Bipartition((0, 1), 3)
        assert symmetry_preserving_entropy(psi, cut) == pytest.approx(1)
        assert symmetry_preserving_entropy(psi, cut) == pytest.approx(entropy(psi, cut))

    @pytest.mark.parametrize("seed", range(5))
    def test_f_symmetric_against_branch_average(self, seed):
        rng = np.random.default_rng(seed)
        h = build_hamiltonian(generate_instance(6, 5, seed))
        from adaptqaoa.ansatz import evaluate

        psi = evaluate(standard_qaoa(6, 3), rng.uniform(0, 2 * np.pi, 6), h)
        cut = middle_cut(6)
        # oracle: project by hand with a dense projector, compute both branch entropies
        branches = []
        for outcome in (0, 1):
            proj = oracles.pauli_matrix([], 6) + (1 - 2 * outcome) * oracles.pauli_matrix([(0, "Z")], 6)
            v = proj @ psi.amplitudes / 2
            p = np.vdot(v, v).real
            rho = oracles.reduced_density_matrix(v / np.sqrt(p), 6, [0, 1, 2])
            lam = np.linalg.eigvalsh(rho)
            lam = lam[lam > 1e-12]
            branches.append((p, -np.sum(lam * np.log2(lam))))
        assert branches[0][0] == pytest.approx(0.5, abs=1e-10)
        assert branches[0][1] == pytest.approx(branches[1][1], abs=1e-9)
        expected = sum(p * s for p, s in branches)
        assert symmetry_preserving_entropy(psi, cut) == pytest.approx(expected, abs=1e-9)

    def test_single_qubit_variant_ghz(self):
        assert symmetry_preserving_single_qubit_entropy(ghz(4)) == pytest.approx(0, abs=1e-12)

    def test_needs_three_qubits(self):
        with pytest.raises(sim.ContractError):
            symmetry_preserving_entropy(ghz(2), middle_cut(2))


class TestSpectrum:
    def test_levels_product(self):
        lv = entanglement_spectrum(sim.init_plus_state(4), middle_cut(4))
        assert lv[0] == pytest.approx(0, abs=1e-12)
        assert np.isinf(lv[1:]).all()

    @given(seeds)
    def test_levels_sum(self, seed):
        lv = entanglement_spectrum(rand_state(6, seed), middle_cut(6))
        assert np.isfinite(lv).all()
        assert np.sum(np.exp(-lv)) == pytest.approx(1, abs=1e-9)
        assert (np.diff(lv) >= 0).all()

    def test_zero_layer_sample(self):
        h = build_hamiltonian(generate_instance(6, 5, 0))
        stats = spectrum_sample(AnsatzProgram(Reference.ALL_PLUS), h, 5, 0)
        assert stats.levels_mean[0] == pytest.approx(0, abs=1e-12)
        assert stats.mean_entropy_middle == pytest.approx(0, abs=1e-12)
        assert stats.levels_mean.size == 1

    def test_level_count_bound(self):
        h = build_hamiltonian(generate_instance(6, 5, 0))
        stats = spectrum_sample(standard_qaoa(6, 4), h, 20, 1)
        assert stats.levels_mean.size <= 8

    def test_sample_size_one_vs_many(self):
        h = build_hamiltonian(generate_instance(6, 5, 0))
        one = spectrum_sample(standard_qaoa(6, 3), h, 1, 3)
        many = spectrum_sample(standard_qaoa(6, 3), h, 300, 3)
        assert one.n_samples == 1 and one.std_entropy_middle == 0
        assert many.std_entropy_middle > 0
        assert 0 < many.mean_entropy_middle < 3

    def test_reproducible(self):
        h = build_hamiltonian(generate_instance(6, 5, 0))
        a = spectrum_sample(standard_qaoa(6, 2), h, 10, 9)
        b = spectrum_sample(standard_qaoa(6, 2), h, 10, 9)
        np.testing.assert_array_equal(a.levels_mean, b.levels_mean)


class TestHaar:
    def test_two_qubit_bounds(self):
        s = haar_baseline(2, Bipartition((0,), 2), 500, 0)
        assert 0 < s.mean_entropy_middle < 1

    def test_monotone_in_smaller_dimension(self):
        means = [haar_baseline(6, Bipartition(tuple(range(k)), 6), 400, k).mean_entropy_middle
                 for k in (1, 2, 3)]
        assert means[0] < means[1] < means[2]

    def test_against_page_formula(self):
        s = haar_baseline(6, middle_cut(6), 10_000, 12345)
        assert s.mean_entropy_middle == pytest.approx(page_entropy(8, 8), rel=0.02)

    def test_two_seeds_agree(self):
        a = haar_baseline(6, middle_cut(6), 10_000, 1)
        b = haar_baseline(6, middle_cut(6), 10_000, 2)
        assert a.mean_entropy_middle == pytest.approx(b.mean_entropy_middle, rel=0.01)
