"""Gate-level circuit representation and lowering passes.

A circuit is three gate lists (reference preparation, parameterised
ansatz, measurement prologue) over a fixed qubit register.  Gates are
lowered for the matrix-product-state backend in two passes:

* :func:`route_nearest_neighbour` inserts SWAP pairs so every two-qubit
  gate acts on neighbouring sites, restoring the identity qubit layout
  afterwards, so the pass is idempotent and observables need no
  relabelling.
* :func:`fuse_gates` absorbs single-qubit gates into neighbouring
  two-qubit unitaries and merges runs on the same pair, leaving only
  dense 4x4 gates.  Fusion runs on bound (numeric) gates.

Parameterised gates carry a slot index into the parameter vector and a
fixed scale; binding substitutes ``angle = scale * theta[slot]``.
"""

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Gate",
    "Circuit",
    "bind_gates",
    "route_nearest_neighbour",
    "fuse_gates",
    "pauli_rotation_gates",
    "hadamard_test_gates",
    "reorder_pair_matrix",
    "circuit_to_text",
    "evolve_mps",
]

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

FIXED_SINGLE = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": _H,
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
}

# two-qubit constants are row-major over (first qubit, second qubit),
# first qubit being the control where that applies
FIXED_PAIR = {
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}

ROTATIONS = ("RX", "RY", "RZ")

_SWAP_PERM = (0, 2, 1, 3)


def reorder_pair_matrix(matrix):
    """Rewrite a 4x4 matrix for qubit order ``(b, a)`` instead of ``(a, b)``."""
    perm = list(_SWAP_PERM)
    return matrix[np.ix_(perm, perm)]


def _rotation_matrix(kind, angle):
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]])
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise ValueError(f"unknown rotation {kind!r}")


@dataclass(frozen=True)
class Gate:
    """One gate: a named constant, a rotation, or a dense pair unitary.

    Rotations store either a fixed ``angle`` or a parameter ``slot`` with
    a ``scale``, never both.  ``U4`` gates carry their matrix directly.
    """

    kind: str
    qubits: tuple
    angle: float = None
    slot: int = None
    scale: float = 1.0
    matrix: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.kind in FIXED_SINGLE and len(self.qubits) != 1:
            raise ValueError(f"{self.kind} acts on one qubit")
        if self.kind in FIXED_PAIR and len(self.qubits) != 2:
            raise ValueError(f"{self.kind} acts on two qubits")
        if self.kind in ROTATIONS:
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} acts on one qubit")
            if (self.angle is None) == (self.slot is None):
                raise ValueError(f"{self.kind} needs either an angle or a slot")
        elif self.kind == "U4":
            if self.matrix is None or self.matrix.shape != (4, 4):
                raise ValueError("U4 needs a 4x4 matrix")
            if len(self.qubits) != 2:
                raise ValueError("U4 acts on two qubits")
        elif self.kind not in FIXED_SINGLE and self.kind not in FIXED_PAIR:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @property
    def is_parameterised(self):
        return self.slot is not None

    def bound_matrix(self, parameters=None):
        """Dense matrix of the gate, resolving any parameter reference."""
        if self.kind in FIXED_SINGLE:
            return FIXED_SINGLE[self.kind]
        if self.kind in FIXED_PAIR:
            return FIXED_PAIR[self.kind]
        if self.kind == "U4":
            return self.matrix
        if self.angle is not None:
            return _rotation_matrix(self.kind, self.angle)
        if parameters is None:
            raise ValueError(f"gate {self.kind} slot {self.slot} needs parameters")
        return _rotation_matrix(self.kind, self.scale * float(parameters[self.slot]))


@dataclass
class Circuit:
    """Reference, ansatz and measurement gate segments on one register."""

    n_qubits: int
    reference: list = field(default_factory=list)
    ansatz: list = field(default_factory=list)
    measurement: list = field(default_factory=list)
    n_parameters: int = 0

    def all_gates(self):
        return list(self.reference) + list(self.ansatz) + list(self.measurement)

    def validate(self):
        slots = set()
        for g in self.all_gates():
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(f"gate {g.kind} touches qubit {q} outside register")
            if g.slot is not None:
                slots.add(g.slot)
        if slots and (min(slots) < 0 or max(slots) >= self.n_parameters):
            raise ValueError("parameter slot outside declared parameter count")
        return self


def bind_gates(gates, parameters=None):
    """Resolve gates to ``(qubits, matrix)`` pairs."""
    return [(g.qubits, g.bound_matrix(parameters)) for g in gates]


def route_nearest_neighbour(gates):
    """Insert SWAP pairs so two-qubit gates act on neighbouring qubits.

    The higher-index qubit is walked down next to its partner and walked
    back immediately after the gate, so the logical-to-physical layout is
    the identity before and after every emitted gate.  Already-local
    circuits pass through unchanged, which makes the pass idempotent.
    """
    routed = []
    for g in gates:
        if len(g.qubits) != 2 or abs(g.qubits[0] - g.qubits[1]) == 1:
            routed.append(g)
            continue
        a, b = g.qubits
        lo, hi = min(a, b), max(a, b)
        ladder = [Gate("SWAP", (p - 1, p)) for p in range(hi, lo + 1, -1)]
        routed.extend(ladder)
        moved = (lo, lo + 1) if a < b else (lo + 1, lo)
        routed.append(
            Gate(g.kind, moved, angle=g.angle, slot=g.slot, scale=g.scale, matrix=g.matrix)
        )
        routed.extend(reversed(ladder))
    return routed


def fuse_gates(bound_gates, n_qubits):
    """Fuse bound gates into dense two-qubit unitaries on ascending pairs.

    Input gates must act on one qubit or a neighbouring pair (route
    first).  Single-qubit matrices are held back and absorbed into the
    next two-qubit gate touching that qubit; consecutive gates on the
    same pair are multiplied together.  Leftover single-qubit factors
    are padded with identities at the end.  Returns ``(qubits, matrix)``
    pairs with ``qubits == (q, q + 1)``.
    """
    if n_qubits < 2:
        # nothing to pair up with; return the single-qubit product
        total = np.eye(2, dtype=complex)
        for qubits, matrix in bound_gates:
            if len(qubits) != 1:
                raise ValueError("pair gate in a one-qubit circuit")
            total = matrix @ total
        return [] if np.allclose(total, np.eye(2)) else [((0,), total)]

    pending = [None] * n_qubits
    fused = []  # list of [pair, matrix], mutable for merging

    def flush_into(pair, matrix):
        q = pair[0]
        left = pending[q] if pending[q] is not None else np.eye(2, dtype=complex)
        right = pending[q + 1] if pending[q + 1] is not None else np.eye(2, dtype=complex)
        pending[q] = pending[q + 1] = None
        matrix = matrix @ np.kron(left, right)
        if fused and fused[-1][0] == pair:
            fused[-1][1] = matrix @ fused[-1][1]
        else:
            fused.append([pair, matrix])

    for qubits, matrix in bound_gates:
        if len(qubits) == 1:
            q = qubits[0]
            pending[q] = matrix if pending[q] is None else matrix @ pending[q]
            continue
        a, b = qubits
        if abs(a - b) != 1:
            raise ValueError(f"gate on ({a}, {b}) is not nearest-neighbour; route first")
        if a > b:
            a, b = b, a
            matrix = reorder_pair_matrix(matrix)
        flush_into((a, b), matrix)

    for q in range(n_qubits):
        if pending[q] is None:
            continue
        if q + 1 < n_qubits:
            flush_into((q, q + 1), np.eye(4, dtype=complex))
        else:
            flush_into((q - 1, q), np.eye(4, dtype=complex))
    return [(pair, matrix) for pair, matrix in fused]


def evolve_mps(state, gates, parameters=None, fuse=True):
    """Apply a gate list to an :class:`MpsState` in place.

    Gates are routed to nearest-neighbour form, bound against
    ``parameters`` and, by default, fused into dense pair unitaries
    before application.
    """
    bound = bind_gates(route_nearest_neighbour(gates), parameters)
    if fuse:
        bound = fuse_gates(bound, state.n_qubits)
    for qubits, matrix in bound:
        if len(qubits) == 2 and qubits[0] > qubits[1]:
            qubits = (qubits[1], qubits[0])
            matrix = reorder_pair_matrix(matrix)
        state.apply_gate(matrix, qubits)
    return state


# -- Pauli rotation gadgets -----------------------------------------------


def pauli_rotation_gates(letters, slot=None, scale=1.0, angle=None):
    """Gates implementing ``exp(-i * angle/2 * P)`` for Pauli string ``P``.

    The string is given as letters over the full register.  Basis-change
    gates map X and Y factors onto Z, a CNOT ladder accumulates the
    parity on the last support qubit, one RZ applies the phase and the
    ladder and basis changes are undone.  With ``slot`` set the RZ angle
    is bound later as ``scale * theta[slot]``.
    """
    support = [q for q, letter in enumerate(letters) if letter != "I"]
    if not support:
        raise ValueError("cannot rotate about the identity string")
    pre = []
    post = []
    for q in support:
        letter = letters[q]
        if letter == "X":
            pre.append(Gate("H", (q,)))
            post.append(Gate("H", (q,)))
        elif letter == "Y":
            # RX(pi/2) maps Z to Y under conjugation
            pre.append(Gate("RX", (q,), angle=np.pi / 2))
            post.append(Gate("RX", (q,), angle=-np.pi / 2))
    ladder = [Gate("CNOT", (a, b)) for a, b in zip(support, support[1:])]
    if angle is not None:
        core = Gate("RZ", (support[-1],), angle=angle)
    else:
        core = Gate("RZ", (support[-1],), slot=slot, scale=scale)
    return pre + ladder + [core] + list(reversed(ladder)) + list(reversed(post))


def hadamard_test_gates(letters, ancilla):
    """Measurement prologue of a Hadamard test for a Pauli string.

    After these gates, the real part of ``<P>`` in the pre-test state
    equals ``<Z>`` on the ancilla qubit.
    """
    support = [(q, letter) for q, letter in enumerate(letters) if letter != "I"]
    gates = [Gate("H", (ancilla,))]
    for q, letter in support:
        if letter == "X":
            gates.append(Gate("CNOT", (ancilla, q)))
        elif letter == "Z":
            gates.append(Gate("CZ", (ancilla, q)))
        elif letter == "Y":
            cy = np.eye(4, dtype=complex)
            cy[2:, 2:] = FIXED_SINGLE["Y"]
            gates.append(Gate("U4", (ancilla, q), matrix=cy))
    gates.append(Gate("H", (ancilla,)))
    return gates


# -- debug output ----------------------------------------------------------


def circuit_to_text(circuit):
    """Readable one-gate-per-line dump of a circuit."""
    out = io.StringIO()
    out.write(f"qubits {circuit.n_qubits} parameters {circuit.n_parameters}\n")
    for name, gates in (
        ("reference", circuit.reference),
        ("ansatz", circuit.ansatz),
        ("measurement", circuit.measurement),
    ):
        out.write(f"[{name}]\n")
        for g in gates:
            qubits = " ".join(str(q) for q in g.qubits)
            if g.slot is not None:
                out.write(f"  {g.kind} {qubits} slot={g.slot} scale={g.scale:.12g}\n")
            elif g.angle is not None:
                out.write(f"  {g.kind} {qubits} angle={g.angle:.12g}\n")
            else:
                out.write(f"  {g.kind} {qubits}\n")
    return out.getvalue()
