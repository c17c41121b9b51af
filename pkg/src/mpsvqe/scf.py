"""Restricted Hartree-Fock in an orthonormal orbital basis.

Integral bundles (FCIDUMP contents, embedded subsystems) are already
expressed over orthonormal orbitals, so there is no overlap matrix:
the Fock operator is diagonalised directly, with DIIS extrapolation on
the commutator residual ``[F, D]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ScfConvergenceError

__all__ = ["ScfResult", "rhf"]


@dataclass
class ScfResult:
    electronic_energy: float
    total_energy: float
    mo_coefficients: np.ndarray
    mo_energies: np.ndarray
    density: np.ndarray  # spatial, trace = n_electrons
    n_iterations: int


def _fock(h, eri, density):
    coulomb = np.einsum("pqrs,rs->pq", eri, density, optimize=True)
    exchange = np.einsum("prqs,rs->pq", eri, density, optimize=True)
    return h + coulomb - 0.5 * exchange


def _electronic_energy(h, fock, density):
    return 0.5 * float(np.sum((h + fock) * density))


def _orbitals_from(fock):
    energies, vectors = np.linalg.eigh(fock)
    # fix the sign so results are reproducible across LAPACK builds
    for col in range(vectors.shape[1]):
        pivot = np.argmax(np.abs(vectors[:, col]))
        if vectors[pivot, col] < 0:
            vectors[:, col] = -vectors[:, col]
    return energies, vectors


def rhf(
    bundle,
    max_iterations=200,
    energy_tol=1e-11,
    gradient_tol=1e-8,
    density_tol=1e-8,
    diis_size=8,
):
    """Solve closed-shell RHF for an orthonormal-basis integral bundle.

    Convergence requires the energy change, the ``[F, D]`` commutator,
    and the density change to all fall below their tolerances.  Returns
    an :class:`ScfResult`; raises
    :class:`~mpsvqe.errors.ScfConvergenceError` when the iteration does
    not settle within ``max_iterations``.
    """
    if bundle.n_electrons % 2 != 0:
        raise ValueError("restricted mean field needs an even electron count")
    n_occ = bundle.n_electrons // 2
    h = bundle.h
    eri = bundle.eri

    _, vectors = _orbitals_from(h)
    density = 2.0 * vectors[:, :n_occ] @ vectors[:, :n_occ].T

    history = []  # (residual, fock) pairs for DIIS
    last_energy = np.inf
    for iteration in range(1, max_iterations + 1):
        fock = _fock(h, eri, density)
        residual = fock @ density - density @ fock
        gradient = np.abs(residual).max() if residual.size else 0.0

        history.append((residual, fock))
        if len(history) > diis_size:
            history.pop(0)
        if len(history) > 1:
            m = len(history)
            b = np.empty((m + 1, m + 1))
            b[:m, :m] = [[np.sum(r1 * r2) for r2, _ in history] for r1, _ in history]
            b[m, :m] = b[:m, m] = -1.0
            b[m, m] = 0.0
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                weights = np.linalg.solve(b, rhs)[:m]
                fock = sum(w * f for w, (_, f) in zip(weights, history))
            except np.linalg.LinAlgError:
                pass  # singular DIIS system: fall back to the bare Fock matrix

        energies, vectors = _orbitals_from(fock)
        previous_density = density
        density = 2.0 * vectors[:, :n_occ] @ vectors[:, :n_occ].T
        density_change = np.abs(density - previous_density).max()
        true_fock = _fock(h, eri, density)
        energy = _electronic_energy(h, true_fock, density)
        delta = abs(energy - last_energy)
        if delta < energy_tol and gradient < gradient_tol and density_change < density_tol:
            return ScfResult(
                electronic_energy=energy,
                total_energy=energy + bundle.core_energy,
                mo_coefficients=vectors,
                mo_energies=energies,
                density=density,
                n_iterations=iteration,
            )
        last_energy = energy

    raise ScfConvergenceError(
        f"mean field did not converge in {max_iterations} iterations "
        f"(last energy change {delta:.2e})"
    )
