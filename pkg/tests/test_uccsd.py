import numpy as np
import pytest
from scipy.linalg import expm

from mpsvqe.oracle import pauli_string_matrix, sv_expect_pauli, sv_run
from mpsvqe.uccsd import build_circuit, build_uccsd, window_generator

from test_operators import dense_fermion
from mpsvqe.operators import spin_orbital_excitation


def brute_force_count(n_spin_orbitals, n_electrons):
    """Count spin-conserving excitations directly from the definition."""
    occ = range(n_electrons)
    virt = range(n_electrons, n_spin_orbitals)
    singles = sum(1 for i in occ for a in virt if i % 2 == a % 2)
    doubles = 0
    for i in occ:
        for j in occ:
            for a in virt:
                for b in virt:
                    if i < j and a < b and (i % 2 + j % 2) == (a % 2 + b % 2):
                        doubles += 1
    return singles, doubles


class TestEnumeration:
    @pytest.mark.parametrize(
        "n_so,n_elec,expected",
        [(4, 2, 3), (12, 4, 92), (14, 10, 140)],
    )
    def test_parameter_counts(self, n_so, n_elec, expected):
        ansatz = build_uccsd(n_so, n_elec)
        assert ansatz.n_parameters == expected
        singles, doubles = brute_force_count(n_so, n_elec)
        assert ansatz.n_singles == singles
        assert ansatz.n_doubles == doubles

    def test_singles_come_first_in_ascending_order(self):
        ansatz = build_uccsd(8, 4)
        ranks = [e.rank for e in ansatz.excitations]
        assert ranks == sorted(ranks)
        singles = [e for e in ansatz.excitations if e.rank == 1]
        assert [e.occupied + e.virtual for e in singles] == sorted(
            e.occupied + e.virtual for e in singles
        )

    def test_no_duplicates(self):
        ansatz = build_uccsd(10, 4)
        keys = [(e.occupied, e.virtual) for e in ansatz.excitations]
        assert len(keys) == len(set(keys))

    def test_spin_conservation(self):
        ansatz = build_uccsd(10, 4)
        for e in ansatz.excitations:
            assert sum(m % 2 for m in e.occupied) == sum(m % 2 for m in e.virtual)

    def test_rejects_odd_electrons(self):
        with pytest.raises(ValueError):
            build_uccsd(6, 3)

    def test_rejects_full_shell(self):
        with pytest.raises(ValueError):
            build_uccsd(4, 4)


class TestPauliExpansion:
    def test_terms_mutually_commute_within_generator(self):
        # commuting terms make the per-generator Trotter step exact
        ansatz = build_uccsd(8, 4)
        for e in ansatz.excitations:
            for letters_a, _ in e.pauli_terms:
                for letters_b, _ in e.pauli_terms:
                    ma = pauli_string_matrix(letters_a)
                    mb = pauli_string_matrix(letters_b)
                    np.testing.assert_allclose(ma @ mb, mb @ ma, atol=1e-13)

    def test_double_excitation_has_eight_strings(self):
        ansatz = build_uccsd(4, 2)
        doubles = [e for e in ansatz.excitations if e.rank == 2]
        assert len(doubles[0].pauli_terms) == 8

    def test_z_interior_on_jw_strings(self):
        # a single spanning modes 1..5 carries a Z chain strictly between
        ansatz = build_uccsd(8, 2)
        single = next(
            e for e in ansatz.excitations if e.occupied == (1,) and e.virtual == (5,)
        )
        for letters, _ in single.pauli_terms:
            assert letters[2:5] == "ZZZ"
            assert letters[0] == "I" and letters[6:] == "II"


class TestCircuit:
    def circuit_state(self, ansatz, theta):
        circuit = build_circuit(ansatz)
        return sv_run(circuit.all_gates(), circuit.n_qubits, parameters=theta)

    def exact_state(self, ansatz, theta):
        n = ansatz.n_qubits
        psi = np.zeros(2**n, complex)
        index = 0
        for mode in range(ansatz.n_electrons):
            index |= 1 << (n - 1 - mode)
        psi[index] = 1.0
        for k, excitation in enumerate(ansatz.excitations):
            g = dense_fermion(
                spin_orbital_excitation(excitation.occupied, excitation.virtual), n
            )
            psi = expm(theta[k] * g) @ psi
        return psi

    @pytest.mark.parametrize("n_so,n_elec", [(4, 2), (6, 2)])
    def test_matches_generator_exponentials(self, n_so, n_elec):
        rng = np.random.default_rng(80)
        ansatz = build_uccsd(n_so, n_elec)
        theta = rng.uniform(-0.8, 0.8, size=ansatz.n_parameters)
        got = self.circuit_state(ansatz, theta)
        want = self.exact_state(ansatz, theta)
        np.testing.assert_allclose(got, want, atol=1e-10)

    def test_zero_parameters_give_reference(self):
        ansatz = build_uccsd(6, 2)
        psi = self.circuit_state(ansatz, np.zeros(ansatz.n_parameters))
        want = np.zeros(64)
        want[0b110000] = 1.0
        np.testing.assert_allclose(np.abs(psi), np.abs(want), atol=1e-12)

    def test_particle_number_conserved(self):
        rng = np.random.default_rng(81)
        ansatz = build_uccsd(6, 4)
        theta = rng.uniform(-1, 1, size=ansatz.n_parameters)
        psi = self.circuit_state(ansatz, theta)
        total = 0.0
        for q in range(6):
            z = sv_expect_pauli(psi, "I" * q + "Z" + "I" * (5 - q)).real
            total += (1.0 - z) / 2.0
        assert total == pytest.approx(4.0, abs=1e-10)

    def test_energy_is_degree_two_trig_polynomial(self):
        # sample one parameter at five nodes, fit, and check elsewhere
        from mpsvqe.operators import jordan_wigner, molecular_hamiltonian
        from mpsvqe.oracle import pauli_sum_matrix
        from test_integrals import fixture_bundle

        bundle, _ = fixture_bundle("h2")
        op, constant = molecular_hamiltonian(bundle.h, bundle.eri, bundle.core_energy)
        hmat = pauli_sum_matrix(jordan_wigner(op, 4)) + constant * np.eye(16)
        ansatz = build_uccsd(4, 2)

        def energy(theta_k):
            theta = np.array([0.13, -0.2, 0.0])
            theta[2] = theta_k
            psi = self.circuit_state(ansatz, theta)
            return float(np.vdot(psi, hmat @ psi).real)

        nodes = np.array([0.0, np.pi / 2, -np.pi / 2, np.pi, np.pi / 4])
        design = np.column_stack(
            [
                np.ones_like(nodes),
                np.cos(nodes),
                np.sin(nodes),
                np.cos(2 * nodes),
                np.sin(2 * nodes),
            ]
        )
        coeffs = np.linalg.solve(design, [energy(t) for t in nodes])
        for probe in (0.3, -1.1, 2.2):
            fit = coeffs @ [1, np.cos(probe), np.sin(probe), np.cos(2 * probe), np.sin(2 * probe)]
            assert energy(probe) == pytest.approx(fit, abs=1e-10)


class TestWindowGenerator:
    def dense_window(self, excitation, first, last):
        """Sum the excitation's Pauli terms (times i) restricted to the window."""
        width = last - first + 1
        out = np.zeros((2**width, 2**width), complex)
        for letters, weight in excitation.pauli_terms:
            assert set(letters[:first]) <= {"I"}
            assert set(letters[last + 1 :]) <= {"I"}
            out += 1j * weight * pauli_string_matrix(letters[first : last + 1])
        return out

    @pytest.mark.parametrize("n_so,n_elec", [(4, 2), (8, 4)])
    def test_matches_dense_pauli_sum(self, n_so, n_elec):
        for excitation in build_uccsd(n_so, n_elec).excitations:
            first, last, g, g2 = window_generator(excitation)
            dense = self.dense_window(excitation, first, last)
            np.testing.assert_allclose(g.toarray(), dense, atol=1e-14)
            np.testing.assert_allclose(g2.toarray(), dense @ dense, atol=1e-14)
            # real antisymmetric: the JW terms carry an odd Y count
            assert np.abs(g.toarray().imag).max() == 0.0

    def test_closed_form_exponential(self):
        # G^3 = -G, so the exponential terminates after the G^2 term
        rng = np.random.default_rng(97)
        ansatz = build_uccsd(8, 4)
        for excitation in (ansatz.excitations[0], ansatz.excitations[-1]):
            first, last, g, g2 = window_generator(excitation)
            dense = g.toarray()
            np.testing.assert_allclose(dense @ dense @ dense, -dense, atol=1e-12)
            theta = float(rng.uniform(-2, 2))
            closed = (
                np.eye(g.shape[0])
                + np.sin(theta) * dense
                + (1.0 - np.cos(theta)) * g2.toarray()
            )
            np.testing.assert_allclose(closed, expm(theta * dense), atol=1e-12)
