"""Density-matrix embedding with matrix-product-state fragment solvers.

The driver follows the single-shot recipe: a restricted mean field over
the whole system, Schmidt-decomposition bath construction per fragment,
an interacting-bath embedded Hamiltonian, fragment ground states from
either exact diagonalisation or the variational MPS solver, and an
outer one-dimensional search on a global chemical potential until the
summed fragment electron numbers match the system.

Fragment energies use democratic partitioning: each fragment counts the
contraction of its own rows of the embedded integrals with its reduced
density matrices, with the environment Coulomb/exchange dressing halved
so fragment/core interactions are shared once each.  The total energy
is the sum of fragment energies plus the nuclear constant.
"""

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np

from .errors import EmbeddingError
from .integrals import IntegralBundle, rotate
from .operators import FermionOperator, jordan_wigner, molecular_hamiltonian
from .oracle import fci_ground_state, sv_expect_pauli
from .scf import rhf
from .uccsd import build_uccsd
from .vqe import VqeProblem, ansatz_state, minimize

__all__ = [
    "MeanField",
    "Fragment",
    "FragmentSolution",
    "DmetState",
    "rhf_scf",
    "build_bath",
    "embed_hamiltonian",
    "solve_fragment",
    "dmet_run",
]

BATH_CUTOFF = 1e-8


@dataclass
class MeanField:
    """Whole-system restricted mean field in the local orbital basis."""

    orbital_coefficients: np.ndarray
    density_matrix: np.ndarray
    hf_energy: float
    n_electrons: int

    def validate(self):
        d = self.density_matrix
        if not np.allclose(d, d.T, atol=1e-10):
            raise ValueError("density matrix is not symmetric")
        if abs(np.trace(d) - self.n_electrons) > 1e-8:
            raise ValueError(
                f"density traces to {np.trace(d):.10f} for {self.n_electrons} electrons"
            )
        if np.abs(d @ d - 2.0 * d).max() > 1e-6:
            raise ValueError("density is not closed-shell idempotent")
        return self


@dataclass
class Fragment:
    """A fragment with its bath, embedded Hamiltonian and bookkeeping."""

    orbital_indices: tuple
    embedding_basis: np.ndarray  # n x m, fragment columns first
    embedded_bundle: IntegralBundle
    n_embedding_electrons: int


@dataclass
class FragmentSolution:
    energy: float
    electron_count: float
    rdm1: np.ndarray  # embedding-basis spatial 1-RDM
    solver_energy: float
    parameters: np.ndarray | None = None


@dataclass
class DmetState:
    fragments: list
    chemical_potential: float
    fragment_energies: list
    fragment_rdm1s: list
    total_electron_count: float
    total_energy: float
    mean_field: MeanField
    n_mu_evaluations: int
    metadata: dict = field(default_factory=dict)


def rhf_scf(bundle):
    """Whole-system restricted mean field, validated for embedding use."""
    result = rhf(bundle)
    return MeanField(
        orbital_coefficients=result.mo_coefficients,
        density_matrix=result.density,
        hf_energy=result.total_energy,
        n_electrons=bundle.n_electrons,
    ).validate()


def build_bath(mean_field, fragment_orbitals):
    """Embedding basis for a fragment from the mean-field density.

    The singular vectors of the environment-fragment block of the
    density above ``BATH_CUTOFF`` become bath orbitals; the basis is the
    fragment identity columns followed by the bath columns.  Returns the
    basis and the (rounded) electron count of the embedding space.
    """
    n = mean_field.density_matrix.shape[0]
    fragment = [int(p) for p in fragment_orbitals]
    if not fragment:
        raise ValueError("fragment needs at least one orbital")
    if sorted(set(fragment)) != sorted(fragment):
        raise ValueError(f"duplicate fragment orbitals in {fragment}")
    if any(p < 0 or p >= n for p in fragment):
        raise ValueError(f"fragment orbitals {fragment} outside range 0..{n - 1}")
    environment = [p for p in range(n) if p not in set(fragment)]

    coupling = mean_field.density_matrix[np.ix_(environment, fragment)]
    if coupling.size:
        u, s, _ = np.linalg.svd(coupling, full_matrices=False)
        kept = int(np.count_nonzero(s > BATH_CUTOFF))
    else:
        u = np.zeros((len(environment), 0))
        kept = 0

    basis = np.zeros((n, len(fragment) + kept))
    basis[fragment, : len(fragment)] = np.eye(len(fragment))
    basis[environment, len(fragment) :] = u[:, :kept]

    projected = basis.T @ mean_field.density_matrix @ basis
    n_embedding_electrons = int(round(np.trace(projected)))
    return basis, n_embedding_electrons


def embed_hamiltonian(bundle, basis, mu, fragment_orbitals, density=None):
    """Embedded integral bundle over the columns of ``basis``.

    One-electron part: basis rotation of ``h`` plus the Coulomb/exchange
    field of the core density (the mean-field density outside the
    embedding space), with ``mu`` subtracted on the fragment-orbital
    diagonals.  Two-electron part: full rotation of ``g`` into the
    embedding space.  The constant carries the core-density energy on
    top of the original nuclear constant.  ``density`` defaults to a
    fresh mean-field solve of ``bundle``.

    The returned bundle's metadata holds the half-dressed one-electron
    matrix used for democratic energy partitioning, which excludes the
    chemical potential and counts the core field at half weight.
    """
    basis = np.asarray(basis, dtype=float)
    if np.abs(basis.T @ basis - np.eye(basis.shape[1])).max() > 1e-10:
        raise ValueError("embedding basis columns are not orthonormal")
    if density is None:
        density = rhf_scf(bundle).density_matrix
    fragment = [int(p) for p in fragment_orbitals]

    embedded_density = basis @ (basis.T @ density @ basis) @ basis.T
    core_density = density - embedded_density

    coulomb = np.einsum("pqrs,rs->pq", bundle.eri, core_density, optimize=True)
    exchange = np.einsum("prqs,rs->pq", bundle.eri, core_density, optimize=True)
    core_field = coulomb - 0.5 * exchange
    core_energy = float(
        np.sum(core_density * bundle.h) + 0.5 * np.sum(core_density * core_field)
    )

    h_solver = basis.T @ (bundle.h + core_field) @ basis
    h_energy = basis.T @ (bundle.h + 0.5 * core_field) @ basis
    for position in range(len(fragment)):
        h_solver[position, position] -= mu

    eri_embedded = np.einsum(
        "pqrs,pa,qb,rc,sd->abcd", bundle.eri, basis, basis, basis, basis, optimize=True
    )

    projected = basis.T @ density @ basis
    embedded = IntegralBundle(
        h=h_solver,
        eri=eri_embedded,
        n_electrons=int(round(np.trace(projected))),
        core_energy=bundle.core_energy + core_energy,
        metadata={
            "fragment_positions": list(range(len(fragment))),
            "h_energy": h_energy,
            "chemical_potential": float(mu),
        },
    )
    embedded.validate()
    return embedded


def _one_body_operator(matrix):
    """Spin-summed one-body fermionic operator for a spatial matrix."""
    op = FermionOperator()
    n = matrix.shape[0]
    for p in range(n):
        for q in range(n):
            if matrix[p, q] == 0.0:
                continue
            for sigma in (0, 1):
                op.add_term(((2 * p + sigma, 1), (2 * q + sigma, 0)), float(matrix[p, q]))
    return op


def _hermitized_qubit_operator(h1, eri, n_modes):
    """Qubit image of ``1/2 (O + O^dag)`` for a (possibly asymmetric)
    one- plus two-body operator; its expectation is ``Re<O>``."""
    op, _ = molecular_hamiltonian(h1, eri)
    op = (op + op.hermitian_conjugate()).scaled(0.5)
    return jordan_wigner(op, n_modes=n_modes)


def _fragment_observables(embedded, coefficients=None):
    """Pauli sums for the democratic fragment energy and the 1-RDM.

    ``coefficients`` rotates the observables from the embedding basis
    into the solver's orbital basis (identity when the solver works in
    the embedding basis directly).
    """
    m = embedded.n_orbitals
    n_modes = embedded.n_spin_orbitals
    positions = embedded.metadata["fragment_positions"]
    h_energy = embedded.metadata["h_energy"]

    mask = np.zeros((m, m))
    mask[positions, :] = h_energy[positions, :]
    eri_mask = np.zeros_like(embedded.eri)
    eri_mask[positions] = embedded.eri[positions]

    if coefficients is not None:
        mask = coefficients.T @ mask @ coefficients
        eri_mask = np.einsum(
            "pqrs,pa,qb,rc,sd->abcd",
            eri_mask,
            coefficients,
            coefficients,
            coefficients,
            coefficients,
            optimize=True,
        )
    observables = [_hermitized_qubit_operator(mask, eri_mask, n_modes)]

    pairs = [(p, q) for p in range(m) for q in range(p, m)]
    for p, q in pairs:
        element = np.zeros((m, m))
        element[p, q] += 0.5
        element[q, p] += 0.5
        if coefficients is not None:
            element = coefficients.T @ element @ coefficients
        observables.append(jordan_wigner(_one_body_operator(element), n_modes=n_modes))
    return observables, pairs


def _expectations(pauli_sums, measure_strings):
    """Evaluate many Pauli sums from one batched string measurement."""
    unique = sorted({s for ps in pauli_sums for s, _ in ps.items()})
    values = dict(zip(unique, measure_strings(unique)))
    return [
        ps.constant + sum(c * values[s] for s, c in ps.items()) for ps in pauli_sums
    ]


def _assemble(embedded, observables, pairs, values):
    m = embedded.n_orbitals
    positions = embedded.metadata["fragment_positions"]
    energy = float(values[0])
    rdm1 = np.zeros((m, m))
    for (p, q), value in zip(pairs, values[1:]):
        rdm1[p, q] = rdm1[q, p] = float(value)
    electron_count = float(np.trace(rdm1[np.ix_(positions, positions)]))
    return energy, electron_count, rdm1


def solve_fragment(
    embedded,
    solver="mps-vqe",
    max_bond=64,
    svd_cutoff=1e-9,
    theta0=None,
    workers=1,
    energy_tolerance=1e-12,
    parameter_tolerance=1e-7,
):
    """Ground state of an embedded bundle plus democratic bookkeeping.

    Returns a :class:`FragmentSolution` with the fragment energy, the
    fragment electron count (trace of the fragment block of the 1-RDM),
    and the full embedding-basis 1-RDM.  The variational solve runs far
    tighter than a standalone energy would need: the chemical-potential
    search differentiates electron counts across nearby solves, which
    only stays smooth when the parameters sit hard against the minimum.
    """
    if solver == "fci":
        op, constant = molecular_hamiltonian(embedded.h, embedded.eri, embedded.core_energy)
        hamiltonian = jordan_wigner(op, n_modes=embedded.n_spin_orbitals)
        hamiltonian.constant += constant
        energy, vector, basis_states = fci_ground_state(
            hamiltonian, embedded.n_electrons, sz=0
        )
        full = np.zeros(2**embedded.n_spin_orbitals, dtype=complex)
        full[basis_states] = vector

        observables, pairs = _fragment_observables(embedded)

        def measure_strings(strings):
            return np.array([sv_expect_pauli(full, s).real for s in strings])

        values = _expectations(observables, measure_strings)
        fragment_energy, electron_count, rdm1 = _assemble(embedded, observables, pairs, values)
        return FragmentSolution(
            energy=fragment_energy,
            electron_count=electron_count,
            rdm1=rdm1,
            solver_energy=float(energy),
        )

    if solver != "mps-vqe":
        raise ValueError(f"unknown fragment solver {solver!r}")

    mean = rhf(embedded)
    rotated = rotate(embedded, mean.mo_coefficients)
    op, constant = molecular_hamiltonian(rotated.h, rotated.eri, rotated.core_energy)
    hamiltonian = jordan_wigner(op, n_modes=embedded.n_spin_orbitals)
    hamiltonian.constant += constant
    problem = VqeProblem(
        hamiltonian=hamiltonian,
        ansatz=build_uccsd(embedded.n_spin_orbitals, embedded.n_electrons),
        max_bond=max_bond,
        svd_cutoff=svd_cutoff,
        energy_tolerance=energy_tolerance,
        parameter_tolerance=parameter_tolerance,
    )
    result = minimize(problem, theta0, workers=workers)
    state = ansatz_state(problem, result.parameters)

    observables, pairs = _fragment_observables(embedded, coefficients=mean.mo_coefficients)
    values = _expectations(observables, state.expect_pauli_strings)
    fragment_energy, electron_count, rdm1 = _assemble(embedded, observables, pairs, values)
    return FragmentSolution(
        energy=fragment_energy,
        electron_count=electron_count,
        rdm1=rdm1,
        solver_energy=result.energy,
        parameters=result.parameters,
    )


def _normalize_fragments(bundle, fragments):
    if isinstance(fragments, (int, np.integer)):
        size = int(fragments)
        if size < 1 or bundle.n_orbitals % size != 0:
            raise ValueError(
                f"fragment size {size} does not tile {bundle.n_orbitals} orbitals"
            )
        return [
            tuple(range(start, start + size))
            for start in range(0, bundle.n_orbitals, size)
        ]
    explicit = [tuple(int(p) for p in fragment) for fragment in fragments]
    covered = sorted(p for fragment in explicit for p in fragment)
    if covered != list(range(bundle.n_orbitals)):
        raise ValueError("fragments must partition the orbitals exactly once")
    return explicit


def _shift_mu(prototype, mu):
    """Embedded bundle at chemical potential ``mu`` from the ``mu = 0``
    prototype; only fragment diagonals of ``h`` depend on ``mu``."""
    shifted = prototype.copy()
    for position in prototype.metadata["fragment_positions"]:
        shifted.h[position, position] -= mu
    shifted.metadata["chemical_potential"] = float(mu)
    return shifted


def dmet_run(
    bundle,
    fragments=1,
    solver="mps-vqe",
    max_bond=64,
    svd_cutoff=1e-9,
    electron_tolerance=1e-5,
    mu_bounds=(-1.0, 1.0),
    max_mu_evaluations=40,
    workers=1,
):
    """Single-shot embedding run with global chemical-potential fitting.

    ``fragments`` is a fragment size that tiles the orbitals, or an
    explicit list of orbital-index groups partitioning them.  The search
    stops when the summed fragment electron count matches the system
    within ``electron_tolerance``; failure to bracket the root inside
    ``mu_bounds`` or to converge raises :class:`EmbeddingError`.
    """
    mean_field = rhf_scf(bundle)
    fragment_indices = _normalize_fragments(bundle, fragments)

    prototypes = []
    for indices in fragment_indices:
        basis, n_embedding = build_bath(mean_field, indices)
        embedded = embed_hamiltonian(
            bundle, basis, 0.0, indices, density=mean_field.density_matrix
        )
        prototypes.append(
            Fragment(
                orbital_indices=indices,
                embedding_basis=basis,
                embedded_bundle=embedded,
                n_embedding_electrons=n_embedding,
            )
        )

    warm = [None] * len(prototypes)
    evaluations = 0

    def solve_all(mu):
        nonlocal evaluations
        evaluations += 1

        def task(index):
            fragment = prototypes[index]
            return solve_fragment(
                _shift_mu(fragment.embedded_bundle, mu),
                solver=solver,
                max_bond=max_bond,
                svd_cutoff=svd_cutoff,
                theta0=warm[index],
            )

        if workers > 1:
            with concurrent.futures.ThreadPoolExecutor(
                max_workers=min(workers, len(prototypes))
            ) as pool:
                solutions = list(pool.map(task, range(len(prototypes))))
        else:
            solutions = [task(index) for index in range(len(prototypes))]
        # anchor every later solve at the first (mu = 0) parameters: with a
        # fixed start each fragment solve is a deterministic function of mu
        # alone, so repeated evaluations reproduce exactly and the counts
        # cannot drift along near-degenerate parameter directions as they
        # would if the start chained from solve to solve
        for index, solution in enumerate(solutions):
            if warm[index] is None and solution.parameters is not None:
                warm[index] = solution.parameters
        residual = sum(s.electron_count for s in solutions) - bundle.n_electrons
        return solutions, residual

    lo, hi = float(mu_bounds[0]), float(mu_bounds[1])
    solutions, residual = solve_all(0.0)
    mu = 0.0
    history = [(0.0, residual)]

    # Fragment occupation grows with mu (the potential lowers fragment
    # levels), so walk against the sign of the residual to bracket.
    bracket = None
    while abs(residual) > electron_tolerance and bracket is None:
        step = 0.05 * 2 ** (len(history) - 1)
        candidate = float(np.clip(mu - np.sign(residual) * step, lo, hi))
        if any(abs(candidate - m) < 1e-15 for m, _ in history):
            raise EmbeddingError(
                f"no chemical-potential bracket inside [{lo}, {hi}]; "
                f"residual {residual:.3e} at mu={mu:.6f}"
            )
        if evaluations >= max_mu_evaluations:
            raise EmbeddingError(
                f"chemical potential not converged after {evaluations} evaluations; "
                f"residual {residual:.3e} at mu={mu:.6f}"
            )
        solutions, residual = solve_all(candidate)
        mu = candidate
        history.append((mu, residual))
        if residual * history[0][1] < 0:
            crossings = [
                (m, r) for m, r in history if r * residual < 0
            ]
            bracket = (min(crossings, key=lambda item: abs(item[0] - mu)), (mu, residual))

    # Illinois-damped false position: a plain bracket secant stalls when
    # one endpoint's residual dwarfs the other's, which is exactly the
    # shape this curve has when the fitted solver sits close to the root.
    while abs(residual) > electron_tolerance:
        (m_a, r_a), (m_b, r_b) = bracket
        candidate = m_b - r_b * (m_b - m_a) / (r_b - r_a)
        width = abs(m_b - m_a)
        inside = min(m_a, m_b) < candidate < max(m_a, m_b)
        if not inside or width < 1e-14:
            candidate = 0.5 * (m_a + m_b)
        if evaluations >= max_mu_evaluations:
            raise EmbeddingError(
                f"chemical potential not converged after {evaluations} evaluations; "
                f"residual {residual:.3e} at mu={mu:.6f}"
            )
        solutions, residual = solve_all(candidate)
        mu = candidate
        history.append((mu, residual))
        if residual * r_b < 0:
            bracket = ((m_b, r_b), (mu, residual))
        else:
            bracket = ((m_a, 0.5 * r_a), (mu, residual))

    total_energy = float(sum(s.energy for s in solutions)) + bundle.core_energy
    return DmetState(
        fragments=prototypes,
        chemical_potential=float(mu),
        fragment_energies=[s.energy for s in solutions],
        fragment_rdm1s=[s.rdm1 for s in solutions],
        total_electron_count=float(
            sum(s.electron_count for s in solutions)
        ),
        total_energy=total_energy,
        mean_field=mean_field,
        n_mu_evaluations=evaluations,
        metadata={
            "solver": solver,
            "electron_residual": float(residual),
            "fragment_electron_counts": [s.electron_count for s in solutions],
            "solver_energies": [s.solver_energy for s in solutions],
        },
    )
