"""Unitary coupled-cluster ansatz with single and double excitations.

Spin orbitals are interleaved (mode ``2p`` alpha, ``2p + 1`` beta of
spatial orbital ``p``) and the closed-shell reference occupies modes
``0 .. n_electrons - 1``.  Excitations conserve particle number and
spin projection; each one carries one parameter, singles enumerated
before doubles, both in ascending index order.

Every excitation generator ``G = T - T^dag`` maps under Jordan-Wigner
to ``i`` times a handful of mutually commuting Pauli strings, so its
exponential is implemented exactly by a sequence of Pauli rotations
sharing one parameter slot.  Because ``G^3 = -G``, the energy along any
single parameter is a trigonometric polynomial of degree two, which the
sweep optimiser exploits.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .circuits import Circuit, Gate, pauli_rotation_gates
from .operators import jordan_wigner_antihermitian, spin_orbital_excitation

__all__ = [
    "Excitation",
    "UccsdAnsatz",
    "build_uccsd",
    "build_circuit",
    "reference_gates",
    "excitation_gates",
    "window_generator",
]


@dataclass(frozen=True)
class Excitation:
    """One excitation: modes promoted, plus its Pauli expansion.

    ``pauli_terms`` holds ``(letters, weight)`` pairs with the generator
    equal to ``i * sum_k weight_k P_k``.
    """

    occupied: tuple
    virtual: tuple
    pauli_terms: tuple

    @property
    def rank(self):
        return len(self.occupied)


@dataclass
class UccsdAnsatz:
    n_qubits: int
    n_electrons: int
    excitations: list

    @property
    def n_parameters(self):
        return len(self.excitations)

    @property
    def n_singles(self):
        return sum(1 for e in self.excitations if e.rank == 1)

    @property
    def n_doubles(self):
        return sum(1 for e in self.excitations if e.rank == 2)


def build_uccsd(n_spin_orbitals, n_electrons):
    """Enumerate spin-conserving singles and doubles for a closed shell.

    Occupied modes are ``0 .. n_electrons - 1``; singles pair equal
    spins, doubles match the spin multiset of the annihilated pair.
    Each unique excitation appears exactly once.
    """
    if n_electrons % 2 != 0:
        raise ValueError("closed-shell ansatz needs an even electron count")
    if not 0 < n_electrons < n_spin_orbitals:
        raise ValueError(
            f"{n_electrons} electrons in {n_spin_orbitals} spin orbitals "
            "leaves no excitation space"
        )
    occupied = range(n_electrons)
    virtual = range(n_electrons, n_spin_orbitals)

    excitations = []
    for i in occupied:
        for a in virtual:
            if i % 2 != a % 2:
                continue
            generator = spin_orbital_excitation((i,), (a,))
            terms = tuple(jordan_wigner_antihermitian(generator, n_modes=n_spin_orbitals))
            excitations.append(Excitation((i,), (a,), terms))
    for i in occupied:
        for j in occupied:
            if j <= i:
                continue
            for a in virtual:
                for b in virtual:
                    if b <= a:
                        continue
                    if (i % 2) + (j % 2) != (a % 2) + (b % 2):
                        continue
                    generator = spin_orbital_excitation((i, j), (a, b))
                    terms = tuple(
                        jordan_wigner_antihermitian(generator, n_modes=n_spin_orbitals)
                    )
                    excitations.append(Excitation((i, j), (a, b), terms))
    return UccsdAnsatz(n_spin_orbitals, n_electrons, excitations)


def reference_gates(n_qubits, n_electrons):
    """X gates preparing the closed-shell reference determinant."""
    if n_electrons > n_qubits:
        raise ValueError("more electrons than spin orbitals")
    return [Gate("X", (mode,)) for mode in range(n_electrons)]


def excitation_gates(excitation, slot):
    """Rotation gadgets for ``exp(theta * G)`` bound to parameter ``slot``.

    A Pauli rotation implements ``exp(-i * angle/2 * P)``, so weight
    ``w`` needs ``angle = -2 * w * theta``.
    """
    gates = []
    for letters, weight in excitation.pauli_terms:
        gates.extend(pauli_rotation_gates(letters, slot=slot, scale=-2.0 * weight))
    return gates


def window_generator(excitation):
    """Sparse matrix of the generator on its contiguous support window.

    Returns ``(first, last, g, g2)`` where ``g`` is the real matrix of
    ``G = i * sum_k weight_k P_k`` restricted to qubits ``first .. last``
    (every letter outside that range is the identity) and ``g2 = g @ g``.
    Site ``first`` is the most significant bit of the window index, the
    same convention the state engine uses for its physical axes.  Since
    ``G^3 = -G``, these two matrices give the exact exponential
    ``exp(theta G) = 1 + sin(theta) g + (1 - cos(theta)) g2``, which lets
    a whole excitation act as one window operator instead of a long
    rotation-gadget gate sequence.
    """
    support = sorted(
        {q for letters, _ in excitation.pauli_terms for q, c in enumerate(letters) if c != "I"}
    )
    first, last = support[0], support[-1]
    width = last - first + 1
    dim = 1 << width
    cols = np.arange(dim, dtype=np.int64)

    data = []
    rows = []
    for letters, weight in excitation.pauli_terms:
        flip = 0
        phase_mask = 0
        n_y = 0
        for pos in range(width):
            letter = letters[first + pos]
            bit = 1 << (width - 1 - pos)
            if letter in "XY":
                flip |= bit
            if letter in "ZY":
                phase_mask |= bit
            n_y += letter == "Y"
        if n_y % 2 == 0:
            raise ValueError("excitation generator terms must have odd Y count")
        # P|c> = i^n_y * (-1)^popcount(c & mask) |c ^ flip>, so the extra
        # factor i in G makes every entry real for odd Y counts
        sign = float((-1) ** (((n_y + 1) // 2) % 2)) * weight
        v = cols & np.int64(phase_mask)
        for shift in (32, 16, 8, 4, 2, 1):
            v ^= v >> shift
        data.append(sign * (1.0 - 2.0 * (v & 1)))
        rows.append(cols ^ np.int64(flip))

    g = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.tile(cols, len(rows)))),
        shape=(dim, dim),
    )
    g.sum_duplicates()
    return first, last, g, g @ g


def build_circuit(ansatz):
    """Full reference-plus-ansatz circuit for an :class:`UccsdAnsatz`."""
    gates = []
    for slot, excitation in enumerate(ansatz.excitations):
        gates.extend(excitation_gates(excitation, slot))
    circuit = Circuit(
        n_qubits=ansatz.n_qubits,
        reference=reference_gates(ansatz.n_qubits, ansatz.n_electrons),
        ansatz=gates,
        n_parameters=ansatz.n_parameters,
    )
    return circuit.validate()
