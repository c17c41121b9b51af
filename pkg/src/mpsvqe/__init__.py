"""Matrix-product-state circuit simulation for variational chemistry.

The pieces compose front to back: parse an integral bundle, transform
it to a qubit Hamiltonian, evolve a UCCSD circuit on a bond-capped
matrix product state, minimise, and optionally wrap the whole solver
inside a density-matrix embedding over fragments of a larger system.
The :mod:`~mpsvqe.oracle` module carries the dense statevector and
exact-diagonalisation references every approximate path is tested
against.
"""

from .circuits import Circuit, Gate, evolve_mps
from .dmet import (
    DmetState,
    FragmentSolution,
    MeanField,
    build_bath,
    dmet_run,
    embed_hamiltonian,
    rhf_scf,
    solve_fragment,
)
from .errors import (
    CapacityError,
    EmbeddingError,
    FcidumpError,
    NumericalError,
    ScfConvergenceError,
)
from .integrals import IntegralBundle, freeze_core, parse_fcidump, rotate, write_fcidump
from .mps import MpsState
from .operators import (
    FermionOperator,
    PauliString,
    PauliSum,
    jordan_wigner,
    molecular_hamiltonian,
)
from .oracle import fci_ground_energy, fci_ground_state, sv_expect_pauli, sv_run
from .scf import ScfResult, rhf
from .uccsd import UccsdAnsatz, build_circuit, build_uccsd
from .vqe import (
    VqeProblem,
    VqeResult,
    ansatz_state,
    evaluate_energy,
    minimize,
    problem_from_bundle,
)

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "evolve_mps",
    "DmetState",
    "FragmentSolution",
    "MeanField",
    "build_bath",
    "dmet_run",
    "embed_hamiltonian",
    "rhf_scf",
    "solve_fragment",
    "CapacityError",
    "EmbeddingError",
    "FcidumpError",
    "NumericalError",
    "ScfConvergenceError",
    "IntegralBundle",
    "freeze_core",
    "parse_fcidump",
    "rotate",
    "write_fcidump",
    "MpsState",
    "FermionOperator",
    "PauliString",
    "PauliSum",
    "jordan_wigner",
    "molecular_hamiltonian",
    "fci_ground_energy",
    "fci_ground_state",
    "sv_expect_pauli",
    "sv_run",
    "ScfResult",
    "rhf",
    "UccsdAnsatz",
    "build_circuit",
    "build_uccsd",
    "VqeProblem",
    "VqeResult",
    "ansatz_state",
    "evaluate_energy",
    "minimize",
    "problem_from_bundle",
    "__version__",
]
