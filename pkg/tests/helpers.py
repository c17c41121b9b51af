"""Shared test utilities: random states, gates and circuits."""

import numpy as np

from mpsvqe.circuits import Gate


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_unitary(rng, dim):
    q, r = np.linalg.qr(crandn(rng, dim, dim))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_gate_list(rng, n_qubits, n_gates, adjacent_only=False):
    """Random mix of dense one- and two-qubit unitaries as U4/rotation gates."""
    gates = []
    for _ in range(n_gates):
        if rng.random() < 0.4 or n_qubits == 1:
            q = int(rng.integers(n_qubits))
            kind = rng.choice(["RX", "RY", "RZ", "H", "S", "X"])
            if kind in ("RX", "RY", "RZ"):
                gates.append(Gate(kind, (q,), angle=float(rng.uniform(-np.pi, np.pi))))
            else:
                gates.append(Gate(str(kind), (q,)))
        else:
            if adjacent_only:
                a = int(rng.integers(n_qubits - 1))
                b = a + 1
            else:
                a, b = (int(x) for x in rng.choice(n_qubits, size=2, replace=False))
            gates.append(Gate("U4", (a, b), matrix=haar_unitary(rng, 4)))
    return gates


def random_pauli_letters(rng, n_qubits, non_identity=False):
    letters = "".join(rng.choice(list("IXYZ"), size=n_qubits))
    if non_identity and set(letters) == {"I"}:
        q = int(rng.integers(n_qubits))
        letters = letters[:q] + "Z" + letters[q + 1 :]
    return letters
