import itertools

import numpy as np
import pytest
from scipy.linalg import expm

from mpsvqe.operators import (
    FermionOperator,
    PauliString,
    PauliSum,
    jordan_wigner,
    jordan_wigner_antihermitian,
    molecular_hamiltonian,
    number_operator,
    pauli_multiply,
    spin_orbital_excitation,
)
from mpsvqe.oracle import pauli_string_matrix, pauli_sum_matrix

from helpers import random_pauli_letters


def ladder_matrix(mode, dag, n_modes):
    """Dense ladder operator in the occupation basis, independent of any
    Pauli algebra: a_j kills bit j with the parity sign of lower modes."""
    dim = 2**n_modes
    m = np.zeros((dim, dim))
    bit = 1 << (n_modes - 1 - mode)
    for state in range(dim):
        sign = (-1) ** bin(state >> (n_modes - mode)).count("1")
        if dag and not state & bit:
            m[state | bit, state] = sign
        elif not dag and state & bit:
            m[state ^ bit, state] = sign
    return m


def dense_fermion(op, n_modes):
    dim = 2**n_modes
    total = np.zeros((dim, dim), complex)
    for ops, coefficient in op.terms.items():
        term = np.eye(dim)
        for mode, dag in ops:
            term = term @ ladder_matrix(mode, dag, n_modes)
        total += coefficient * term
    return total


class TestPauliMultiply:
    def test_single_letter_table_matches_matrices(self):
        for a, b in itertools.product("IXYZ", repeat=2):
            phase, product = pauli_multiply(a, b)
            got = phase * pauli_string_matrix(product.letters)
            want = pauli_string_matrix(a) @ pauli_string_matrix(b)
            np.testing.assert_allclose(got, want, atol=1e-15)

    def test_random_strings(self):
        rng = np.random.default_rng(50)
        for _ in range(20):
            a = random_pauli_letters(rng, 4)
            b = random_pauli_letters(rng, 4)
            phase, product = pauli_multiply(a, b)
            got = phase * pauli_string_matrix(product.letters)
            want = pauli_string_matrix(a) @ pauli_string_matrix(b)
            np.testing.assert_allclose(got, want, atol=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            pauli_multiply("XY", "X")


class TestPauliString:
    def test_trailing_identities_ignored_in_equality(self):
        assert PauliString("XZI") == PauliString("XZ")
        assert hash(PauliString("XZI")) == hash(PauliString("XZ"))
        assert PauliString("XZI") != PauliString("XZX")

    def test_support(self):
        assert PauliString("IXIZ").support == (1, 3)
        assert PauliString("III").is_identity

    def test_invalid_letters(self):
        with pytest.raises(ValueError):
            PauliString("AXB")


class TestPauliSum:
    def test_merge_and_cancel(self):
        ps = PauliSum(2)
        ps.add_term("XZ", 0.5)
        ps.add_term("XZ", 0.25)
        ps.add_term("ZZ", 1.0)
        ps.add_term("ZZ", -1.0)
        assert ps.coefficient("XZ") == 0.75
        assert ps.coefficient("ZZ") == 0.0
        assert ps.n_terms == 1

    def test_identity_goes_to_constant(self):
        ps = PauliSum(3, constant=1.0)
        ps.add_term("III", 0.5)
        assert ps.constant == 1.5
        assert ps.n_terms == 1
        ps.add_term("IXI", 2.0)
        assert ps.n_terms == 2

    def test_items_sorted(self):
        ps = PauliSum(2, terms={"ZZ": 1.0, "IX": 2.0, "XI": 3.0})
        assert [k for k, _ in ps.items()] == sorted(["ZZ", "IX", "XI"])

    def test_pruned(self):
        ps = PauliSum(1, terms={"X": 1e-15, "Z": 1.0})
        assert ps.pruned(1e-12).n_terms == 1

    def test_dict_roundtrip(self):
        ps = PauliSum(2, terms={"XY": 0.5, "ZI": -1.5}, constant=0.25)
        back = PauliSum.from_dict(ps.to_dict())
        assert back.items() == ps.items()
        assert back.constant == ps.constant

    def test_wrong_length_rejected(self):
        with pytest.raises(ValueError, match="letters for"):
            PauliSum(3).add_term("XX", 1.0)


class TestNormalOrdering:
    def test_anticommutators(self):
        n = 3
        for p in range(n):
            for q in range(n):
                anti = FermionOperator({((p, 0), (q, 1)): 1.0, ((q, 1), (p, 0)): 1.0})
                dense = dense_fermion(anti, n)
                want = np.eye(2**n) if p == q else np.zeros((2**n, 2**n))
                np.testing.assert_allclose(dense, want, atol=1e-14)

    def test_ordering_preserves_operator(self):
        rng = np.random.default_rng(51)
        n = 4
        for _ in range(15):
            length = int(rng.integers(2, 5))
            ops = tuple(
                (int(rng.integers(n)), int(rng.integers(2))) for _ in range(length)
            )
            raw = np.eye(2**n, dtype=complex)
            for mode, dag in ops:
                raw = raw @ ladder_matrix(mode, dag, n)
            ordered = FermionOperator({ops: 1.0})
            np.testing.assert_allclose(dense_fermion(ordered, n), raw, atol=1e-13)

    def test_canonical_form(self):
        op = FermionOperator({((1, 0), (0, 1)): 1.0})
        for ops in op.terms:
            dags = [d for _, d in ops]
            assert dags == sorted(dags, reverse=True)

    def test_nilpotency(self):
        op = FermionOperator({((2, 1), (2, 1)): 1.0})
        assert op.terms == {}


class TestJordanWigner:
    def test_occupation_operator(self):
        ps = jordan_wigner(FermionOperator({((1, 1), (1, 0)): 1.0}), n_modes=3)
        assert ps.constant == pytest.approx(0.5)
        assert ps.coefficient("IZI") == pytest.approx(-0.5)
        assert ps.n_terms == 2

    def test_hopping_term(self):
        op = FermionOperator({((0, 1), (1, 0)): 1.0, ((1, 1), (0, 0)): 1.0})
        ps = jordan_wigner(op, n_modes=2)
        assert ps.coefficient("XX") == pytest.approx(0.5)
        assert ps.coefficient("YY") == pytest.approx(0.5)
        assert ps.n_terms == 2

    def test_matches_ladder_oracle(self):
        rng = np.random.default_rng(52)
        n = 4
        for _ in range(10):
            op = FermionOperator()
            for _ in range(4):
                p, q = int(rng.integers(n)), int(rng.integers(n))
                c = float(rng.standard_normal())
                op.add_term(((p, 1), (q, 0)), c)
                op.add_term(((q, 1), (p, 0)), c)
            got = pauli_sum_matrix(jordan_wigner(op, n_modes=n))
            np.testing.assert_allclose(got, dense_fermion(op, n), atol=1e-12)

    def test_z_string_between_modes(self):
        op = FermionOperator({((0, 1), (3, 0)): 1.0, ((3, 1), (0, 0)): 1.0})
        ps = jordan_wigner(op, n_modes=4)
        assert set(ps.strings()) == {"XZZX", "YZZY"}

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="non-Hermitian"):
            jordan_wigner(FermionOperator({((0, 1), (1, 0)): 1.0}), n_modes=2)

    def test_antihermitian_mapping(self):
        g = spin_orbital_excitation((0,), (2,))
        terms = jordan_wigner_antihermitian(g, n_modes=4)
        dense = sum(
            1j * w * pauli_string_matrix(letters) for letters, w in terms
        )
        np.testing.assert_allclose(dense, dense_fermion(g, 4), atol=1e-13)

    def test_antihermitian_rejects_hermitian(self):
        with pytest.raises(ValueError, match="anti-Hermitian"):
            jordan_wigner_antihermitian(number_operator(2), n_modes=2)


class TestExcitations:
    def test_generators_are_antihermitian(self):
        for occupied, virtual in (((0,), (2,)), ((0, 1), (2, 3))):
            g = dense_fermion(spin_orbital_excitation(occupied, virtual), 4)
            np.testing.assert_allclose(g, -g.conj().T, atol=1e-14)

    def test_exponential_is_unitary_and_cubes_back(self):
        g = dense_fermion(spin_orbital_excitation((0, 1), (2, 3)), 4)
        # generators with distinct modes satisfy G^3 = -G, which is what
        # makes energy a second-order trigonometric polynomial per angle
        np.testing.assert_allclose(g @ g @ g, -g, atol=1e-13)
        u = expm(0.37 * g)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(16), atol=1e-13)

    def test_number_operator(self):
        dense = dense_fermion(number_operator(3, modes=(0, 2)), 3)
        diag = np.diag(dense)
        assert diag[0b000] == 0
        assert diag[0b101] == 2
        assert diag[0b100] == 1


class TestMolecularHamiltonian:
    def test_two_orbital_spectrum_against_ladder_oracle(self):
        rng = np.random.default_rng(53)
        n = 2
        h1 = rng.standard_normal((n, n))
        h1 = (h1 + h1.T) / 2
        eri = rng.standard_normal((n,) * 4)
        # impose the full eightfold symmetry of real orbitals
        eri = eri + eri.transpose(1, 0, 2, 3)
        eri = eri + eri.transpose(0, 1, 3, 2)
        eri = eri + eri.transpose(2, 3, 0, 1)
        op, constant = molecular_hamiltonian(h1, eri, constant=0.25)
        dense = dense_fermion(op, 2 * n) + constant * np.eye(16)
        qubit = pauli_sum_matrix(jordan_wigner(op, n_modes=2 * n)) + constant * np.eye(16)
        np.testing.assert_allclose(qubit, dense, atol=1e-12)
        np.testing.assert_allclose(dense, dense.conj().T, atol=1e-12)
