import numpy as np
import pytest
from scipy.linalg import expm

from mpsvqe.circuits import (
    Circuit,
    Gate,
    bind_gates,
    circuit_to_text,
    evolve_mps,
    fuse_gates,
    hadamard_test_gates,
    pauli_rotation_gates,
    reorder_pair_matrix,
    route_nearest_neighbour,
)
from mpsvqe.mps import MpsState
from mpsvqe.oracle import pauli_string_matrix, sv_expect_pauli, sv_run

from helpers import haar_unitary, random_gate_list, random_pauli_letters


class TestGate:
    def test_rotation_needs_angle_or_slot(self):
        with pytest.raises(ValueError):
            Gate("RZ", (0,))
        with pytest.raises(ValueError):
            Gate("RZ", (0,), angle=0.3, slot=1)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown gate kind"):
            Gate("FOO", (0,))

    def test_bound_rotation_matrices(self):
        theta = 0.7
        for kind, pauli in (("RX", "X"), ("RY", "Y"), ("RZ", "Z")):
            got = Gate(kind, (0,), angle=theta).bound_matrix()
            want = expm(-0.5j * theta * pauli_string_matrix(pauli))
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_slot_binding(self):
        g = Gate("RZ", (2,), slot=1, scale=-2.0)
        got = g.bound_matrix([0.0, 0.25])
        want = Gate("RZ", (2,), angle=-0.5).bound_matrix()
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_unbound_slot_raises(self):
        with pytest.raises(ValueError, match="needs parameters"):
            Gate("RZ", (0,), slot=0).bound_matrix()

    def test_cnot_truth_table(self):
        cnot = Gate("CNOT", (0, 1)).bound_matrix()
        basis = np.eye(4)
        np.testing.assert_allclose(cnot @ basis[2], basis[3], atol=1e-15)
        np.testing.assert_allclose(cnot @ basis[1], basis[1], atol=1e-15)


class TestReorder:
    def test_reversed_cnot(self):
        # CNOT with control on the second qubit: |01> -> |11>
        rev = reorder_pair_matrix(Gate("CNOT", (0, 1)).bound_matrix())
        basis = np.eye(4)
        np.testing.assert_allclose(rev @ basis[1], basis[3], atol=1e-15)
        np.testing.assert_allclose(rev @ basis[2], basis[2], atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(40)
        m = haar_unitary(rng, 4)
        np.testing.assert_allclose(reorder_pair_matrix(reorder_pair_matrix(m)), m)


class TestRouting:
    def test_spans_are_adjacent_after_routing(self):
        rng = np.random.default_rng(41)
        gates = random_gate_list(rng, 6, 30)
        routed = route_nearest_neighbour(gates)
        for g in routed:
            if len(g.qubits) == 2:
                assert abs(g.qubits[0] - g.qubits[1]) == 1

    def test_routing_preserves_state(self):
        rng = np.random.default_rng(42)
        for _ in range(5):
            gates = random_gate_list(rng, 5, 20)
            psi_raw = sv_run(gates, 5)
            psi_routed = sv_run(route_nearest_neighbour(gates), 5)
            np.testing.assert_allclose(psi_routed, psi_raw, atol=1e-10)

    def test_idempotent(self):
        rng = np.random.default_rng(43)
        gates = random_gate_list(rng, 5, 15)
        once = route_nearest_neighbour(gates)
        twice = route_nearest_neighbour(once)
        assert once == twice

    def test_example_decomposition(self):
        routed = route_nearest_neighbour([Gate("CNOT", (0, 2))])
        kinds = [(g.kind, g.qubits) for g in routed]
        assert kinds == [("SWAP", (1, 2)), ("CNOT", (0, 1)), ("SWAP", (1, 2))]

    def test_descending_control(self):
        routed = route_nearest_neighbour([Gate("CNOT", (3, 0))])
        psi = sv_run(routed, 4, initial=None)
        # control is qubit 3 which is |0>, so nothing happens
        want = np.zeros(16)
        want[0] = 1
        np.testing.assert_allclose(psi, want, atol=1e-12)
        psi2 = sv_run([Gate("X", (3,))] + routed, 4)
        want2 = np.zeros(16)
        want2[0b1001] = 1
        np.testing.assert_allclose(psi2, want2, atol=1e-12)


class TestFusion:
    def test_fused_circuit_matches_statevector(self):
        rng = np.random.default_rng(44)
        for _ in range(5):
            gates = random_gate_list(rng, 5, 25, adjacent_only=True)
            bound = bind_gates(gates)
            fused = fuse_gates(bound, 5)
            psi_raw = sv_run(gates, 5)
            fused_gates = [Gate("U4", pair, matrix=m) for pair, m in fused]
            psi_fused = sv_run(fused_gates, 5)
            np.testing.assert_allclose(psi_fused, psi_raw, atol=1e-10)

    def test_output_pairs_ascending(self):
        rng = np.random.default_rng(45)
        gates = random_gate_list(rng, 6, 40, adjacent_only=True)
        fused = fuse_gates(bind_gates(gates), 6)
        for pair, _ in fused:
            assert pair[1] == pair[0] + 1

    def test_fusion_shrinks_gate_count(self):
        rng = np.random.default_rng(46)
        gates = []
        for _ in range(10):
            gates.append(Gate("H", (0,)))
            gates.append(Gate("U4", (0, 1), matrix=haar_unitary(rng, 4)))
        fused = fuse_gates(bind_gates(gates), 2)
        assert len(fused) == 1

    def test_trailing_singles_are_emitted(self):
        fused = fuse_gates(bind_gates([Gate("X", (2,))]), 3)
        assert len(fused) == 1
        pair, matrix = fused[0]
        assert pair == (1, 2)
        np.testing.assert_allclose(matrix, np.kron(np.eye(2), Gate("X", (0,)).bound_matrix()))

    def test_non_adjacent_input_rejected(self):
        with pytest.raises(ValueError, match="route"):
            fuse_gates(bind_gates([Gate("CNOT", (0, 2))]), 3)


class TestPauliRotation:
    def test_matches_exponential(self):
        rng = np.random.default_rng(47)
        for _ in range(10):
            n = 4
            letters = random_pauli_letters(rng, n, non_identity=True)
            theta = float(rng.uniform(-2, 2))
            start = random_gate_list(rng, n, 8)
            psi0 = sv_run(start, n)
            gates = pauli_rotation_gates(letters, angle=theta)
            got = sv_run(gates, n, initial=psi0)
            want = expm(-0.5j * theta * pauli_string_matrix(letters)) @ psi0
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_slot_form_binds(self):
        letters = "XYZI"
        gates = pauli_rotation_gates(letters, slot=0, scale=-2.0)
        psi_slot = sv_run(gates, 4, parameters=[0.35])
        psi_fixed = sv_run(pauli_rotation_gates(letters, angle=-0.7), 4)
        np.testing.assert_allclose(psi_slot, psi_fixed, atol=1e-12)

    def test_identity_rejected(self):
        with pytest.raises(ValueError, match="identity"):
            pauli_rotation_gates("III", angle=0.1)


class TestHadamardTest:
    def test_real_part_on_ancilla(self):
        rng = np.random.default_rng(48)
        n = 4
        for _ in range(8):
            prep = random_gate_list(rng, n, 12)
            letters = random_pauli_letters(rng, n)
            psi = sv_run(prep, n)
            want = sv_expect_pauli(psi, letters).real

            gates = [
                Gate(g.kind, g.qubits, angle=g.angle, slot=g.slot, scale=g.scale, matrix=g.matrix)
                for g in prep
            ] + hadamard_test_gates(letters, ancilla=n)
            phi = sv_run(gates, n + 1)
            got = sv_expect_pauli(phi, "I" * n + "Z").real
            np.testing.assert_allclose(got, want, atol=1e-10)

    def test_on_mps_backend(self):
        rng = np.random.default_rng(49)
        n = 4
        prep = random_gate_list(rng, n, 10)
        letters = "XZYI"
        mps = MpsState.product_state("0" * (n + 1))
        evolve_mps(mps, prep)
        want = mps.expect_pauli_string(letters + "I")
        evolve_mps(mps, hadamard_test_gates(letters, ancilla=n))
        z = np.diag([1.0, -1.0]).astype(complex)
        np.testing.assert_allclose(mps.expect_local(z, n), want, atol=1e-9)


class TestCircuitContainer:
    def test_validate_catches_bad_slot(self):
        c = Circuit(2, ansatz=[Gate("RZ", (0,), slot=3)], n_parameters=2)
        with pytest.raises(ValueError, match="slot"):
            c.validate()

    def test_validate_catches_bad_qubit(self):
        c = Circuit(2, reference=[Gate("X", (5,))])
        with pytest.raises(ValueError, match="outside register"):
            c.validate()

    def test_text_dump(self):
        c = Circuit(
            3,
            reference=[Gate("X", (0,))],
            ansatz=[Gate("RZ", (2,), slot=0, scale=-2.0)],
            measurement=[Gate("H", (1,))],
            n_parameters=1,
        )
        text = circuit_to_text(c)
        assert "qubits 3 parameters 1" in text
        assert "[ansatz]" in text
        assert "RZ 2 slot=0 scale=-2" in text
