"""Pauli and fermionic operator algebra with the Jordan-Wigner mapping.

Pauli strings are stored as plain letter strings over a fixed register,
``"IXZY"`` meaning X on qubit 1, Z on qubit 2, Y on qubit 3.  Spin
orbitals are interleaved: mode ``2p`` is the alpha spin orbital of
spatial orbital ``p`` and mode ``2p + 1`` its beta partner, and mode
``j`` maps onto qubit ``j``.
"""

from collections import defaultdict

import numpy as np

__all__ = [
    "PauliString",
    "PauliSum",
    "pauli_multiply",
    "FermionOperator",
    "jordan_wigner",
    "jordan_wigner_antihermitian",
    "molecular_hamiltonian",
    "number_operator",
    "spin_orbital_excitation",
]

_LETTERS = frozenset("IXYZ")

# single-letter products: (a, b) -> (phase, product letter)
_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


class PauliString:
    """An n-qubit Pauli string, hashed with trailing identities ignored."""

    __slots__ = ("letters",)

    def __init__(self, letters):
        letters = str(letters)
        if not set(letters) <= _LETTERS:
            raise ValueError(f"invalid Pauli letters in {letters!r}")
        self.letters = letters

    @property
    def n_qubits(self):
        return len(self.letters)

    @property
    def support(self):
        return tuple(q for q, letter in enumerate(self.letters) if letter != "I")

    @property
    def is_identity(self):
        return not self.support

    def __eq__(self, other):
        if isinstance(other, str):
            other = PauliString(other)
        return self.letters.rstrip("I") == other.letters.rstrip("I")

    def __hash__(self):
        return hash(self.letters.rstrip("I"))

    def __repr__(self):
        return f"PauliString({self.letters!r})"

    def __str__(self):
        return self.letters


def pauli_multiply(a, b):
    """Product of two equal-length strings as ``(phase, PauliString)``."""
    sa = a.letters if isinstance(a, PauliString) else str(a)
    sb = b.letters if isinstance(b, PauliString) else str(b)
    if len(sa) != len(sb):
        raise ValueError(f"length mismatch: {len(sa)} vs {len(sb)} letters")
    phase = 1 + 0j
    out = []
    for la, lb in zip(sa, sb):
        p, letter = _PRODUCT[(la, lb)]
        phase *= p
        out.append(letter)
    return phase, PauliString("".join(out))


class PauliSum:
    """Real linear combination of Pauli strings plus an identity constant.

    Terms are kept in a canonical sorted order; the identity component
    lives in ``constant`` and never appears as an explicit term.
    """

    def __init__(self, n_qubits, terms=None, constant=0.0):
        self.n_qubits = int(n_qubits)
        self.constant = float(constant)
        self._terms = {}
        if terms:
            for letters, coefficient in dict(terms).items():
                self.add_term(letters, coefficient)

    def add_term(self, letters, coefficient):
        key = letters.letters if isinstance(letters, PauliString) else str(letters)
        if len(key) != self.n_qubits:
            raise ValueError(f"term has {len(key)} letters for {self.n_qubits} qubits")
        if not set(key) <= _LETTERS:
            raise ValueError(f"invalid Pauli letters in {key!r}")
        coefficient = float(coefficient)
        if set(key) <= {"I"}:
            self.constant += coefficient
            return
        updated = self._terms.get(key, 0.0) + coefficient
        if updated == 0.0:
            self._terms.pop(key, None)
        else:
            self._terms[key] = updated

    def items(self):
        """Terms as ``(letters, coefficient)`` in canonical sorted order."""
        return sorted(self._terms.items())

    def strings(self):
        return [letters for letters, _ in self.items()]

    @property
    def n_terms(self):
        """Number of terms including the identity when present."""
        return len(self._terms) + (1 if self.constant != 0.0 else 0)

    def coefficient(self, letters):
        key = letters.letters if isinstance(letters, PauliString) else str(letters)
        return self._terms.get(key, 0.0)

    def pruned(self, threshold=1e-12):
        """Copy without terms smaller in magnitude than ``threshold``."""
        out = PauliSum(self.n_qubits, constant=self.constant)
        for letters, coefficient in self._terms.items():
            if abs(coefficient) >= threshold:
                out.add_term(letters, coefficient)
        return out

    def scaled(self, factor):
        out = PauliSum(self.n_qubits, constant=self.constant * factor)
        for letters, coefficient in self._terms.items():
            out.add_term(letters, coefficient * factor)
        return out

    def __add__(self, other):
        if other.n_qubits != self.n_qubits:
            raise ValueError("qubit counts differ")
        out = PauliSum(self.n_qubits, constant=self.constant + other.constant)
        for letters, coefficient in self._terms.items():
            out.add_term(letters, coefficient)
        for letters, coefficient in other._terms.items():
            out.add_term(letters, coefficient)
        return out

    def __repr__(self):
        return f"PauliSum(n_qubits={self.n_qubits}, n_terms={self.n_terms})"

    def to_dict(self):
        """JSON-friendly representation."""
        return {
            "n_qubits": self.n_qubits,
            "constant": self.constant,
            "terms": {k: v for k, v in self.items()},
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["n_qubits"], terms=data["terms"], constant=data["constant"])


class FermionOperator:
    """Polynomial in fermionic ladder operators, kept normal ordered.

    Terms are tuples of ``(mode, 1)`` for creation and ``(mode, 0)`` for
    annihilation.  On ingestion every product is rewritten with all
    creations (ascending mode) before all annihilations (descending
    mode), applying anticommutation signs and contraction deltas.
    """

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for ops, coefficient in dict(terms).items():
                self.add_term(ops, coefficient)

    def add_term(self, ops, coefficient):
        for normal_ops, sign in _normal_order(tuple(ops)):
            updated = self.terms.get(normal_ops, 0.0) + sign * coefficient
            if updated == 0.0:
                self.terms.pop(normal_ops, None)
            else:
                self.terms[normal_ops] = updated
        return self

    def __add__(self, other):
        out = FermionOperator(self.terms)
        for ops, coefficient in other.terms.items():
            out.add_term(ops, coefficient)
        return out

    def scaled(self, factor):
        return FermionOperator({ops: c * factor for ops, c in self.terms.items()})

    def hermitian_conjugate(self):
        out = FermionOperator()
        for ops, coefficient in self.terms.items():
            conj = tuple((mode, 1 - dag) for mode, dag in reversed(ops))
            out.add_term(conj, np.conj(coefficient))
        return out

    @property
    def max_mode(self):
        modes = [mode for ops in self.terms for mode, _ in ops]
        return max(modes) if modes else -1

    def __repr__(self):
        return f"FermionOperator(n_terms={len(self.terms)})"


def _normal_order(ops):
    """Expand an operator product into normal-ordered terms with signs.

    Creations are sorted to the left in ascending mode order, then
    annihilations in descending mode order; each swap of unequal modes
    flips the sign and swapping ``a_p a^dag_p`` inserts the identity
    contraction ``1 - a^dag_p a_p``.  Yields ``(ops, sign)`` pairs.
    """
    stack = [(tuple(ops), 1.0)]
    done = []
    while stack:
        ops, sign = stack.pop()
        swapped = False
        for i in range(len(ops) - 1):
            (m1, d1), (m2, d2) = ops[i], ops[i + 1]
            if d1 == 0 and d2 == 1:
                # a_m1 a^dag_m2 = delta - a^dag_m2 a_m1
                rest = ops[:i] + (ops[i + 1], ops[i]) + ops[i + 2 :]
                stack.append((rest, -sign))
                if m1 == m2:
                    stack.append((ops[:i] + ops[i + 2 :], sign))
                swapped = True
                break
            if d1 == d2 and m1 == m2:
                swapped = True  # nilpotent: a a or a^dag a^dag on one mode
                break
            if (d1 == d2 == 1 and m1 > m2) or (d1 == d2 == 0 and m1 < m2):
                rest = ops[:i] + (ops[i + 1], ops[i]) + ops[i + 2 :]
                stack.append((rest, -sign))
                swapped = True
                break
        if not swapped:
            done.append((ops, sign))
    return done


def _jw_ladder(mode, dag, n_modes):
    """Jordan-Wigner image of one ladder operator as two weighted strings."""
    z_part = "Z" * mode
    pad = "I" * (n_modes - mode - 1)
    x_string = z_part + "X" + pad
    y_string = z_part + "Y" + pad
    y_coeff = -0.5j if dag else 0.5j
    return ((x_string, 0.5), (y_string, y_coeff))


def _jw_expand(operator, n_modes):
    """Raw complex-coefficient Jordan-Wigner expansion of an operator."""
    identity = "I" * n_modes
    accumulated = defaultdict(complex)
    for ops, coefficient in operator.terms.items():
        partial = {identity: complex(coefficient)}
        for mode, dag in ops:
            if mode >= n_modes:
                raise ValueError(f"mode {mode} outside register of {n_modes}")
            updated = defaultdict(complex)
            for letters, value in partial.items():
                for factor_letters, factor_value in _jw_ladder(mode, dag, n_modes):
                    phase, product = pauli_multiply(letters, factor_letters)
                    updated[product.letters] += value * factor_value * phase
            partial = updated
        for letters, value in partial.items():
            accumulated[letters] += value
    return accumulated


def jordan_wigner(operator, n_modes=None, prune=1e-12):
    """Map a Hermitian fermionic operator to a qubit operator.

    Mode ``j`` acts on qubit ``j`` with a Z string on all lower modes.
    The image of a Hermitian operator has real coefficients; a residual
    imaginary part above tolerance raises.
    """
    if n_modes is None:
        n_modes = operator.max_mode + 1
    accumulated = _jw_expand(operator, n_modes)
    scale = max((abs(v) for v in accumulated.values()), default=1.0)
    result = PauliSum(n_modes)
    for letters, value in accumulated.items():
        if abs(value.imag) > 1e-9 * max(scale, 1.0):
            raise ValueError(
                f"non-Hermitian input: imaginary coefficient {value.imag:.3e} on {letters}"
            )
        if abs(value.real) >= prune:
            result.add_term(letters, value.real)
    return result


def jordan_wigner_antihermitian(operator, n_modes=None, prune=1e-12):
    """Map an anti-Hermitian fermionic operator ``G`` to Pauli terms.

    Returns ``(letters, weight)`` pairs such that ``G`` equals
    ``i * sum_k weight_k P_k``; the gate sequence for ``exp(theta G)``
    follows directly from Pauli rotations.
    """
    if n_modes is None:
        n_modes = operator.max_mode + 1
    accumulated = _jw_expand(operator, n_modes)
    scale = max((abs(v) for v in accumulated.values()), default=1.0)
    terms = []
    for letters, value in sorted(accumulated.items()):
        if abs(value.real) > 1e-9 * max(scale, 1.0):
            raise ValueError(
                f"non-anti-Hermitian input: real coefficient {value.real:.3e} on {letters}"
            )
        if abs(value.imag) >= prune:
            terms.append((letters, value.imag))
    return terms


def number_operator(n_modes, modes=None):
    """Total occupation of the given modes (all modes by default)."""
    op = FermionOperator()
    for mode in modes if modes is not None else range(n_modes):
        op.add_term(((mode, 1), (mode, 0)), 1.0)
    return op


def spin_orbital_excitation(occupied, virtual):
    """Anti-Hermitian single or double excitation generator.

    ``occupied`` and ``virtual`` are tuples of spin-orbital modes; the
    generator is ``T - T^dag`` with ``T`` promoting the occupied modes
    into the virtual ones.
    """
    if len(occupied) == 1:
        (i,), (a,) = occupied, virtual
        t = FermionOperator({((a, 1), (i, 0)): 1.0})
    elif len(occupied) == 2:
        (i, j), (a, b) = occupied, virtual
        t = FermionOperator({((a, 1), (b, 1), (j, 0), (i, 0)): 1.0})
    else:
        raise ValueError("only single and double excitations are supported")
    return t + t.hermitian_conjugate().scaled(-1.0)


def molecular_hamiltonian(h1, eri, constant=0.0):
    """Second-quantised electronic Hamiltonian from spatial integrals.

    ``h1`` is the one-electron matrix and ``eri`` the two-electron
    tensor in chemists' index order ``(pq|rs)``; both are over spatial
    orbitals, expanded here onto interleaved spin orbitals:

        H = sum h_pq a^dag_p a_q
          + 1/2 sum (pq|rs) a^dag_p a^dag_r a_s a_q   (per spin pair)
    """
    h1 = np.asarray(h1)
    eri = np.asarray(eri)
    n = h1.shape[0]
    op = FermionOperator()
    for p in range(n):
        for q in range(n):
            if h1[p, q] == 0.0:
                continue
            for sigma in (0, 1):
                op.add_term(((2 * p + sigma, 1), (2 * q + sigma, 0)), float(h1[p, q]))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    value = eri[p, q, r, s]
                    if value == 0.0:
                        continue
                    for sigma in (0, 1):
                        for tau in (0, 1):
                            ops = (
                                (2 * p + sigma, 1),
                                (2 * r + tau, 1),
                                (2 * s + tau, 0),
                                (2 * q + sigma, 0),
                            )
                            op.add_term(ops, 0.5 * float(value))
    return op, float(constant)
