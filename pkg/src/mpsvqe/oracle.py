"""Dense reference backend: statevector evolution and exact diagonalisation.

Everything here scales exponentially and is capped at 24 qubits.  It
exists to cross-check the matrix-product-state engine and to provide
exact ground-state energies for small systems.  Qubit 0 is the most
significant bit of a computational-basis index, matching the network
simulator's site ordering.
"""

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .circuits import bind_gates
from .errors import CapacityError, NumericalError

__all__ = [
    "sv_run",
    "sv_expect_pauli",
    "pauli_string_matrix",
    "pauli_sum_matrix",
    "sector_basis",
    "pauli_sum_sector_matrix",
    "fci_ground_state",
    "fci_ground_energy",
]

QUBIT_LIMIT = 24
_DENSE_EIG_LIMIT = 1200

PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_width(n_qubits):
    if n_qubits > QUBIT_LIMIT:
        raise CapacityError(f"{n_qubits} qubits exceed the dense limit of {QUBIT_LIMIT}")


def sv_run(gates, n_qubits, parameters=None, initial=None):
    """Run a gate list on a dense statevector and return the final vector.

    Gates may act on arbitrary qubit pairs; no routing is required here,
    which is exactly what makes this a useful oracle for the routed
    network backend.
    """
    _check_width(n_qubits)
    if initial is None:
        psi = np.zeros(2**n_qubits, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial, dtype=complex)
        if psi.shape != (2**n_qubits,):
            raise ValueError("initial vector has wrong length")
    psi = psi.reshape((2,) * n_qubits)
    for qubits, matrix in bind_gates(gates, parameters):
        if len(qubits) == 1:
            q = qubits[0]
            psi = np.moveaxis(np.tensordot(matrix, psi, axes=([1], [q])), 0, q)
        else:
            a, b = qubits
            m = matrix.reshape(2, 2, 2, 2)
            psi = np.moveaxis(
                np.tensordot(m, psi, axes=([2, 3], [a, b])), [0, 1], [a, b]
            )
    return psi.reshape(-1)


def sv_expect_pauli(psi, letters):
    """``<psi|P|psi>`` for a Pauli string on a dense vector."""
    n = len(letters)
    phi = psi.reshape((2,) * n)
    for q, letter in enumerate(letters):
        if letter == "I":
            continue
        phi = np.moveaxis(np.tensordot(PAULI_1Q[letter], phi, axes=([1], [q])), 0, q)
    return complex(np.vdot(psi, phi.reshape(-1)))


def pauli_string_matrix(letters):
    """Dense matrix of a Pauli string, qubit 0 as the leading factor."""
    _check_width(len(letters))
    out = np.array([[1.0 + 0j]])
    for letter in letters:
        out = np.kron(out, PAULI_1Q[letter])
    return out


def pauli_sum_matrix(pauli_sum):
    """Dense matrix of an operator given as a Pauli-string expansion."""
    n = pauli_sum.n_qubits
    _check_width(n)
    out = np.eye(2**n, dtype=complex) * pauli_sum.constant
    for letters, coefficient in pauli_sum.items():
        out += coefficient * pauli_string_matrix(letters)
    return out


# -- symmetry-sector exact diagonalisation ---------------------------------


def _mode_masks(n_qubits):
    # qubit q occupies bit position n-1-q of a basis index
    even = 0
    odd = 0
    for q in range(n_qubits):
        bit = 1 << (n_qubits - 1 - q)
        if q % 2 == 0:
            even |= bit
        else:
            odd |= bit
    return even, odd


def _popcount(values):
    return np.bitwise_count(values.astype(np.uint64)).astype(np.int64)


def sector_basis(n_qubits, n_particles, sz=None):
    """Basis indices with ``n_particles`` set bits, optionally fixed Sz.

    ``sz`` is in units of half-integer spin (number of alpha minus beta
    occupations over two) under the even/odd interleaving of spin
    orbitals.  Indices are returned sorted ascending.
    """
    _check_width(n_qubits)
    states = np.arange(2**n_qubits, dtype=np.uint64)
    keep = _popcount(states) == n_particles
    if sz is not None:
        even_mask, _ = _mode_masks(n_qubits)
        n_alpha = _popcount(states & np.uint64(even_mask))
        keep &= 2 * n_alpha - n_particles == int(round(2 * sz))
    return states[keep]


def pauli_sum_sector_matrix(pauli_sum, basis):
    """Sparse matrix of an operator restricted to a particle-number basis.

    Strings that map a basis state outside the sector contribute nothing;
    for particle-conserving operators that never happens and the
    restriction is exact.

    Strings sharing an X/Y flip pattern hit the same sparsity slot, so the
    matrix is assembled pattern by pattern directly in CSC layout: one
    entry per basis state per pattern.  Memory then scales with the number
    of distinct patterns instead of the (much larger) number of strings,
    which is what keeps a 20-qubit sector within desk-scale RAM.  The
    restriction must be Hermitian; a structural check rejects anything
    else without ever forming the adjoint.
    """
    n = pauli_sum.n_qubits
    _check_width(n)
    basis = np.asarray(basis, dtype=np.uint64)
    dim = basis.shape[0]
    lookup = np.full(2**n, -1, dtype=np.int64)
    lookup[basis.astype(np.int64)] = np.arange(dim)

    groups = {0: []}
    for letters, coefficient in pauli_sum.items():
        flip = 0
        zymask = 0
        n_y = 0
        for q, letter in enumerate(letters):
            bit = 1 << (n - 1 - q)
            if letter in "XY":
                flip |= bit
            if letter in "YZ":
                zymask |= bit
            if letter == "Y":
                n_y += 1
        groups.setdefault(flip, []).append((zymask, n_y, coefficient))

    order = sorted(groups)
    cols = np.arange(dim, dtype=np.int64)
    real = np.zeros((dim, len(order)))
    imag = None
    rows = np.empty((dim, len(order)), dtype=np.int32)
    herm_gap = 0.0
    for g, flip in enumerate(order):
        for zymask, n_y, coefficient in groups[flip]:
            parity = _popcount(basis & np.uint64(zymask)) & 1
            # i**n_y folds into a sign and a choice of component
            scale = coefficient * (-1.0) ** (n_y // 2)
            contribution = np.where(parity == 0, scale, -scale)
            if n_y & 1:
                if imag is None:
                    imag = np.zeros_like(real)
                imag[:, g] += contribution
            else:
                real[:, g] += contribution
        if flip == 0:
            real[:, g] += pauli_sum.constant
            targets = cols
        else:
            targets = lookup[(basis ^ np.uint64(flip)).astype(np.int64)]
            invalid = targets < 0
            if invalid.any():
                real[invalid, g] = 0.0
                if imag is not None:
                    imag[invalid, g] = 0.0
                targets = np.where(invalid, cols, targets)
        rows[:, g] = targets
        # Hermiticity per pattern: flips are involutions on the sector, so
        # the value at a target row must mirror the value at its source
        herm_gap = max(herm_gap, np.abs(real[targets, g] - real[:, g]).max())
        if imag is not None:
            herm_gap = max(herm_gap, np.abs(imag[targets, g] + imag[:, g]).max())
    if herm_gap > 1e-9:
        raise NumericalError(f"sector Hamiltonian not Hermitian (gap {herm_gap:.2e})")

    if imag is not None and np.abs(imag).max() > 1e-12:
        data = real + 1j * imag
    else:
        data = real
    indptr = np.arange(dim + 1, dtype=np.int64) * len(order)
    matrix = sp.csc_matrix((data.ravel(), rows.ravel(), indptr), shape=(dim, dim))
    matrix.eliminate_zeros()
    return matrix


def fci_ground_state(pauli_sum, n_particles, sz=None):
    """Lowest eigenpair of an operator in a particle-number sector.

    Returns ``(energy, vector, basis)`` where the vector lives on the
    sector basis.  Small sectors are diagonalised densely; larger ones
    use an iterative Lanczos-style solver with a deterministic start.
    """
    basis = sector_basis(pauli_sum.n_qubits, n_particles, sz=sz)
    if basis.shape[0] == 0:
        raise ValueError(f"empty sector: {n_particles} particles in {pauli_sum.n_qubits} qubits")
    matrix = pauli_sum_sector_matrix(pauli_sum, basis)
    dim = matrix.shape[0]
    if dim <= _DENSE_EIG_LIMIT:
        energies, vectors = np.linalg.eigh(matrix.toarray())
        return float(energies[0]), vectors[:, 0], basis
    v0 = np.full(dim, 1.0 / np.sqrt(dim))
    try:
        energies, vectors = eigsh(matrix, k=1, which="SA", v0=v0, tol=1e-10, maxiter=20000)
    except ArpackNoConvergence as exc:
        raise NumericalError("sector eigensolver did not converge") from exc
    return float(energies[0]), vectors[:, 0], basis


def fci_ground_energy(pauli_sum, n_particles, sz=None):
    energy, _, _ = fci_ground_state(pauli_sum, n_particles, sz=sz)
    return energy
