import numpy as np
import pytest

import mpsvqe.oracle as oracle
from mpsvqe.errors import CapacityError
from mpsvqe.operators import (
    FermionOperator,
    PauliSum,
    jordan_wigner,
    molecular_hamiltonian,
    number_operator,
)
from mpsvqe.oracle import (
    fci_ground_energy,
    fci_ground_state,
    pauli_string_matrix,
    pauli_sum_matrix,
    pauli_sum_sector_matrix,
    sector_basis,
    sv_expect_pauli,
    sv_run,
)

from test_integrals import fixture_bundle


def qubit_hamiltonian(name):
    bundle, meta = fixture_bundle(name)
    op, constant = molecular_hamiltonian(bundle.h, bundle.eri, bundle.core_energy)
    ps = jordan_wigner(op, n_modes=bundle.n_spin_orbitals)
    ps.constant += constant
    return ps, bundle, meta


def popcount(x):
    return bin(int(x)).count("1")


class TestPauliMatrices:
    def test_string_matrix_ordering(self):
        # qubit 0 is the most significant bit: Z on qubit 0 of two flips
        # the sign of the lower half of the basis
        m = pauli_string_matrix("ZI")
        np.testing.assert_array_equal(np.diag(m).real, [1, 1, -1, -1])

    def test_sum_matrix(self):
        ps = PauliSum(2, terms={"XX": 0.5, "ZI": -1.0}, constant=0.25)
        want = (
            0.5 * pauli_string_matrix("XX")
            - pauli_string_matrix("ZI")
            + 0.25 * np.eye(4)
        )
        np.testing.assert_allclose(pauli_sum_matrix(ps), want, atol=1e-15)

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            pauli_string_matrix("I" * 25)


class TestSectorBasis:
    def test_counts(self):
        assert sector_basis(4, 2).shape[0] == 6
        assert sector_basis(4, 0).shape[0] == 1
        assert sector_basis(6, 3).shape[0] == 20

    def test_sz_restriction(self):
        # two particles, one alpha (even modes) and one beta: 2 x 2 states
        basis = sector_basis(4, 2, sz=0)
        assert basis.shape[0] == 4
        for state in basis:
            assert popcount(state) == 2

    def test_h10_singlet_sector_size(self):
        basis = sector_basis(20, 10, sz=0)
        assert basis.shape[0] == 63504  # C(10,5)^2

    def test_sorted_ascending(self):
        basis = sector_basis(5, 2)
        assert np.all(np.diff(basis.astype(np.int64)) > 0)


class TestSectorMatrix:
    def test_matches_dense_restriction(self):
        rng = np.random.default_rng(70)
        n = 4
        op = FermionOperator()
        for _ in range(5):
            p, q = int(rng.integers(n)), int(rng.integers(n))
            c = float(rng.standard_normal())
            op.add_term(((p, 1), (q, 0)), c)
            op.add_term(((q, 1), (p, 0)), c)
        ps = jordan_wigner(op, n_modes=n)
        ps.constant += 0.3
        basis = sector_basis(n, 2)
        got = pauli_sum_sector_matrix(ps, basis).toarray()
        dense = pauli_sum_matrix(ps)
        want = dense[np.ix_(basis.astype(int), basis.astype(int))]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_number_operator_is_diagonal(self):
        ps = jordan_wigner(number_operator(4), n_modes=4)
        basis = sector_basis(4, 3)
        m = pauli_sum_sector_matrix(ps, basis).toarray()
        np.testing.assert_allclose(m, 3 * np.eye(4), atol=1e-12)


class TestFciGroundState:
    def test_h2_matches_generator_metadata(self):
        ps, bundle, meta = qubit_hamiltonian("h2")
        energy = fci_ground_energy(ps, bundle.n_electrons)
        assert energy == pytest.approx(meta["fci_energy"], abs=1e-9)

    def test_h2_term_count(self):
        ps, _, _ = qubit_hamiltonian("h2")
        assert ps.n_terms == 15

    def test_h4_matches_generator_metadata(self):
        ps, bundle, meta = qubit_hamiltonian("h4")
        energy = fci_ground_energy(ps, bundle.n_electrons, sz=0)
        assert energy == pytest.approx(meta["fci_energy"], abs=1e-8)

    def test_sector_restriction_matches_full_minimum(self):
        ps, bundle, _ = qubit_hamiltonian("h2")
        dense = pauli_sum_matrix(ps)
        basis = sector_basis(4, 2)
        block = dense[np.ix_(basis.astype(int), basis.astype(int))]
        want = np.linalg.eigvalsh(block)[0]
        assert fci_ground_energy(ps, 2) == pytest.approx(want, abs=1e-10)

    def test_iterative_branch_agrees_with_dense(self, monkeypatch):
        ps, bundle, meta = qubit_hamiltonian("h2")
        monkeypatch.setattr(oracle, "_DENSE_EIG_LIMIT", 2)
        energy = fci_ground_energy(ps, bundle.n_electrons)
        assert energy == pytest.approx(meta["fci_energy"], abs=1e-8)

    def test_ground_vector_is_eigenvector(self):
        ps, bundle, _ = qubit_hamiltonian("h2")
        energy, vector, basis = fci_ground_state(ps, 2)
        m = pauli_sum_sector_matrix(ps, basis)
        np.testing.assert_allclose(m @ vector, energy * vector, atol=1e-9)

    def test_empty_sector_rejected(self):
        ps = PauliSum(2, terms={"ZZ": 1.0})
        with pytest.raises(ValueError, match="empty sector"):
            fci_ground_energy(ps, 5)


class TestStatevectorExpectation:
    def test_matches_matrix_route(self):
        rng = np.random.default_rng(71)
        psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi /= np.linalg.norm(psi)
        for letters in ("XIZ", "YYI", "ZZZ", "III"):
            want = np.vdot(psi, pauli_string_matrix(letters) @ psi)
            got = sv_expect_pauli(psi, letters)
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_sv_run_capacity(self):
        with pytest.raises(CapacityError):
            sv_run([], 25)
