"""Variational energy minimisation over matrix-product-state circuits.

``evaluate_energy`` realises the measurement loop: the Pauli strings of
the Hamiltonian are split into contiguous index blocks, each worker
evolves its own state replica through the one shared ansatz circuit and
measures its block, and the per-string values are reduced in fixed
index order.  The result is therefore independent of the worker count
to machine precision.

``minimize`` drives one of three classical optimisers:

* ``sweep`` (default): exploits the fact that the energy along any
  single UCCSD parameter is exactly ``a + b cos t + c sin t +
  d cos 2t + e sin 2t``.  A first pass walks the generators in circuit
  order, fitting that curve from five samples and applying each
  accepted rotation to an incrementally grown state, which keeps the
  per-generator cost at one excitation block rather than one full
  circuit.  Subsequent passes re-fit coordinates with full circuit
  evaluations until the energy stops improving.
* ``nelder-mead``: bounded simplex refinement.
* ``lbfgs``: quasi-Newton with central finite-difference gradients.
"""

import concurrent.futures
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .circuits import (
    bind_gates,
    fuse_gates,
    hadamard_test_gates,
    reorder_pair_matrix,
    route_nearest_neighbour,
)
from .errors import NumericalError
from .integrals import rotate
from .mps import MpsState
from .operators import jordan_wigner, molecular_hamiltonian
from .scf import rhf
from .uccsd import build_uccsd, excitation_gates, reference_gates, window_generator

__all__ = [
    "VqeProblem",
    "VqeResult",
    "ansatz_state",
    "evaluate_energy",
    "minimize",
    "problem_from_bundle",
]

def _gain_floor(problem):
    # coordinate updates below this predicted gain are not worth a
    # rotation; scales with the requested tolerance down to the level
    # where fitted gains are dominated by round-off
    return max(1e-13, 0.01 * problem.energy_tolerance)

_Z = np.diag([1.0, -1.0]).astype(complex)

# windowed excitation application: largest generator matrix dimension and
# largest contracted window block (in complex entries) worth using.  The
# dimension cap bounds the cached sparse generators to a few MB per
# excitation; the block cap rejects wide windows whose boundary bonds are
# already large, for which the routed gate path is cheaper than one dense
# contraction.
_WINDOW_DIM_LIMIT = 1 << 14
_WINDOW_BLOCK_LIMIT = 1 << 22

# five sample offsets pinning a degree-two trigonometric polynomial
_TRIG_OFFSETS = np.array([0.0, 0.5 * np.pi, -0.5 * np.pi, np.pi, 0.25 * np.pi])
_TRIG_DESIGN_INV = np.linalg.inv(
    np.column_stack(
        [
            np.ones_like(_TRIG_OFFSETS),
            np.cos(_TRIG_OFFSETS),
            np.sin(_TRIG_OFFSETS),
            np.cos(2.0 * _TRIG_OFFSETS),
            np.sin(2.0 * _TRIG_OFFSETS),
        ]
    )
)


@dataclass
class VqeProblem:
    """A qubit Hamiltonian, an ansatz, and the knobs of the run."""

    hamiltonian: object  # PauliSum
    ansatz: object  # UccsdAnsatz
    max_bond: int = 64
    svd_cutoff: float = 1e-9
    measurement_mode: str = "direct"  # direct | hadamard_test
    optimizer: str = "sweep"  # sweep | nelder-mead | lbfgs
    max_iterations: int = 500
    energy_tolerance: float = 1e-7
    parameter_tolerance: float = 1e-6
    fd_step: float = 1e-4
    shared_ansatz: bool = True
    scheduling: str = "static"  # static | dynamic
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.hamiltonian.n_qubits != self.ansatz.n_qubits:
            raise ValueError(
                f"hamiltonian acts on {self.hamiltonian.n_qubits} qubits, "
                f"ansatz on {self.ansatz.n_qubits}"
            )
        if self.measurement_mode not in ("direct", "hadamard_test"):
            raise ValueError(f"unknown measurement mode {self.measurement_mode!r}")
        if self.optimizer not in ("sweep", "nelder-mead", "lbfgs"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.scheduling not in ("static", "dynamic"):
            raise ValueError(f"unknown scheduling mode {self.scheduling!r}")
        self._cache = {}

    @property
    def n_parameters(self):
        return self.ansatz.n_parameters

    @property
    def n_sites(self):
        # hadamard_test keeps a private ancilla as the last site
        return self.hamiltonian.n_qubits + (1 if self.measurement_mode == "hadamard_test" else 0)

    # -- cached lowered circuits ---------------------------------------

    def _measurement_terms(self):
        if "terms" not in self._cache:
            items = self.hamiltonian.items()
            self._cache["terms"] = (
                [letters for letters, _ in items],
                np.array([coefficient for _, coefficient in items]),
            )
        return self._cache["terms"]

    def _routed_reference(self):
        if "reference" not in self._cache:
            gates = reference_gates(self.hamiltonian.n_qubits, self.ansatz.n_electrons)
            self._cache["reference"] = route_nearest_neighbour(gates)
        return self._cache["reference"]

    def _routed_excitation(self, k):
        cache = self._cache.setdefault("excitations", {})
        if k not in cache:
            cache[k] = route_nearest_neighbour(
                excitation_gates(self.ansatz.excitations[k], slot=k)
            )
        return cache[k]

    def _excitation_window(self, k):
        cache = self._cache.setdefault("windows", {})
        if k not in cache:
            first, last, g, g2 = window_generator(self.ansatz.excitations[k])
            # wide windows would need huge generator matrices; those
            # excitations stay on the routed gate path
            cache[k] = (first, last, g, g2) if g.shape[0] <= _WINDOW_DIM_LIMIT else None
        return cache[k]


def problem_from_bundle(bundle, prune=1e-10, **options):
    """Build a VQE problem from an integral bundle.

    The mean field is solved first and the Hamiltonian expressed in its
    molecular orbitals, so the ansatz reference is the converged
    determinant.  Keyword options become :class:`VqeProblem` fields.
    """
    mean_field = rhf(bundle)
    mo_bundle = rotate(bundle, mean_field.mo_coefficients)
    op, constant = molecular_hamiltonian(mo_bundle.h, mo_bundle.eri, mo_bundle.core_energy)
    hamiltonian = jordan_wigner(op, n_modes=bundle.n_spin_orbitals, prune=prune)
    hamiltonian.constant += constant
    ansatz = build_uccsd(bundle.n_spin_orbitals, bundle.n_electrons)
    problem = VqeProblem(hamiltonian=hamiltonian, ansatz=ansatz, **options)
    problem.metadata["rhf_energy"] = mean_field.total_energy
    return problem


@dataclass
class VqeResult:
    energy: float
    parameters: np.ndarray
    iterations: int
    energy_history: list
    truncation_error_max: float
    converged: bool
    n_evaluations: int


# -- state construction and measurement -------------------------------------


def _apply_bound(state, bound_gates):
    fused = fuse_gates(bound_gates, state.n_qubits)
    for qubits, matrix in fused:
        if len(qubits) == 2 and qubits[0] > qubits[1]:
            qubits = (qubits[1], qubits[0])
            matrix = reorder_pair_matrix(matrix)
        state.apply_gate(matrix, qubits)
    return state


def _fresh_state(problem):
    return MpsState.product_state(
        "0" * problem.n_sites, max_bond=problem.max_bond, svd_cutoff=problem.svd_cutoff
    )


def _evolved_state(problem, parameters):
    """Reference plus ansatz evolution on a fresh state replica."""
    state = _apply_bound(_fresh_state(problem), bind_gates(problem._routed_reference()))
    for k in range(problem.n_parameters):
        _apply_excitation(problem, state, k, float(parameters[k]))
    return state


def ansatz_state(problem, parameters):
    """The matrix-product state prepared by the bound ansatz circuit."""
    parameters = np.asarray(parameters, dtype=float)
    if parameters.shape != (problem.n_parameters,):
        raise ValueError(
            f"expected {problem.n_parameters} parameters, got shape {parameters.shape}"
        )
    return _evolved_state(problem, parameters)


def _measure_strings(problem, state, letters):
    """Per-string expectation values on an evolved state."""
    if problem.measurement_mode == "direct":
        return state.expect_pauli_strings(letters)
    ancilla = problem.hamiltonian.n_qubits
    values = np.empty(len(letters))
    for i, string in enumerate(letters):
        trial = state.copy()
        _apply_bound(trial, bind_gates(route_nearest_neighbour(
            hadamard_test_gates(string, ancilla))))
        values[i] = trial.expect_local(_Z, ancilla)
    return values


def _measure_energy(problem, state):
    letters, coefficients = problem._measurement_terms()
    values = _measure_strings(problem, state, letters)
    return float(np.sum(values * coefficients) + problem.hamiltonian.constant)


def evaluate_energy(problem, parameters, workers=1):
    """Energy ``sum_i a_i <P_i>`` of the bound ansatz state.

    Strings are split into contiguous index blocks; every worker evolves
    its own state through the shared ansatz once and measures its block.
    Values are reduced in index order, making the result identical for
    any worker count.
    """
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"worker count must be positive, got {workers}")
    parameters = np.asarray(parameters, dtype=float)
    if parameters.shape != (problem.n_parameters,):
        raise ValueError(
            f"expected {problem.n_parameters} parameters, got shape {parameters.shape}"
        )
    energy, _ = _evaluate(problem, parameters, workers)
    return energy


def _evaluate(problem, parameters, workers=1):
    """Energy plus the accumulated truncation error of the evolved state."""
    letters, coefficients = problem._measurement_terms()
    n_strings = len(letters)
    values = np.empty(n_strings)
    truncation = 0.0

    if not problem.shared_ansatz:
        # contrast path: rebuild the full circuit state for every string
        for i, string in enumerate(letters):
            state = _evolved_state(problem, parameters)
            values[i] = _measure_strings(problem, state, [string])[0]
            truncation = max(truncation, state.accumulated_truncation_error)
        return float(np.sum(values * coefficients) + problem.hamiltonian.constant), truncation

    n_blocks = workers if problem.scheduling == "static" else min(4 * workers, n_strings)
    bounds = np.linspace(0, n_strings, max(n_blocks, 1) + 1).astype(int)
    blocks = [(bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1) if bounds[i] < bounds[i + 1]]

    def run_block(block):
        lo, hi = block
        state = _evolved_state(problem, parameters)
        return lo, hi, _measure_strings(problem, state, letters[lo:hi]), state.accumulated_truncation_error

    if workers == 1:
        state = _evolved_state(problem, parameters)
        values = _measure_strings(problem, state, letters)
        truncation = state.accumulated_truncation_error
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            for lo, hi, block_values, block_truncation in pool.map(run_block, blocks):
                values[lo:hi] = block_values
                truncation = max(truncation, block_truncation)

    return float(np.sum(values * coefficients) + problem.hamiltonian.constant), truncation


# -- sweep optimiser ---------------------------------------------------------


def _trig_fit(energies):
    """Coefficients (a0, a1, b1, a2, b2) through the five sample offsets."""
    return _TRIG_DESIGN_INV @ np.asarray(energies)


def _trig_minimum(coefficients):
    """Global minimum of the fitted curve over one period."""
    a0, a1, b1, a2, b2 = coefficients
    grid = np.linspace(-np.pi, np.pi, 257)
    values = (
        a0
        + a1 * np.cos(grid)
        + b1 * np.sin(grid)
        + a2 * np.cos(2 * grid)
        + b2 * np.sin(2 * grid)
    )
    t = grid[int(np.argmin(values))]
    for _ in range(40):
        d1 = -a1 * np.sin(t) + b1 * np.cos(t) - 2 * a2 * np.sin(2 * t) + 2 * b2 * np.cos(2 * t)
        d2 = -a1 * np.cos(t) - b1 * np.sin(t) - 4 * a2 * np.cos(2 * t) - 4 * b2 * np.sin(2 * t)
        if abs(d2) < 1e-14:
            break
        step = d1 / d2
        t -= step
        if abs(step) < 1e-12:
            break
    value = a0 + a1 * np.cos(t) + b1 * np.sin(t) + a2 * np.cos(2 * t) + b2 * np.sin(2 * t)
    t = (t + np.pi) % (2 * np.pi) - np.pi
    return float(t), float(value)


def _trig_nearest_minimum(coefficients):
    """Local minimum of the fitted curve closest to zero displacement.

    Warm-started solves must stay on the solution branch they were given:
    jumping to a distant minimum of a coordinate slice can hop between
    near-degenerate parameter basins with very different reduced density
    matrices, which turns downstream quantities into discontinuous
    functions of the Hamiltonian.  Following the nearest minimum keeps
    the optimized state a smooth continuation of its starting point.
    """
    a0, a1, b1, a2, b2 = coefficients
    grid = np.linspace(-np.pi, np.pi, 257)
    values = (
        a0
        + a1 * np.cos(grid)
        + b1 * np.sin(grid)
        + a2 * np.cos(2 * grid)
        + b2 * np.sin(2 * grid)
    )
    interior = np.arange(1, grid.size - 1)
    local = interior[
        (values[interior] <= values[interior - 1])
        & (values[interior] <= values[interior + 1])
    ]
    if local.size == 0:
        return _trig_minimum(coefficients)
    t = grid[local[int(np.argmin(np.abs(grid[local])))]]
    for _ in range(40):
        d1 = -a1 * np.sin(t) + b1 * np.cos(t) - 2 * a2 * np.sin(2 * t) + 2 * b2 * np.cos(2 * t)
        d2 = -a1 * np.cos(t) - b1 * np.sin(t) - 4 * a2 * np.cos(2 * t) - 4 * b2 * np.sin(2 * t)
        if d2 <= 1e-14:
            break
        step = d1 / d2
        t -= step
        if abs(step) < 1e-12:
            break
    value = a0 + a1 * np.cos(t) + b1 * np.sin(t) + a2 * np.cos(2 * t) + b2 * np.sin(2 * t)
    t = (t + np.pi) % (2 * np.pi) - np.pi
    return float(t), float(value)


def _apply_excitation(problem, state, k, angle):
    """Evolve ``state`` by ``exp(angle * G_k)`` for one excitation generator.

    Small generators act as a single window operator through their exact
    exponential ``1 + sin(t) G + (1 - cos(t)) G^2``; anything too wide for
    that falls back to the routed rotation-gadget sequence.  Both paths
    realise the same unitary.
    """
    if angle == 0.0:
        return state
    window = problem._excitation_window(k)
    if window is not None:
        first, last, g, g2 = window
        dl = state.site_tensors[first].shape[0]
        dr = state.site_tensors[last].shape[2]
        if dl * g.shape[0] * dr <= _WINDOW_BLOCK_LIMIT:
            s = np.sin(angle)
            c = 1.0 - np.cos(angle)
            state.apply_window_operator(
                lambda x: x + s * (g @ x) + c * (g2 @ x), first, last
            )
            return state
    parameters = np.zeros(problem.n_parameters)
    parameters[k] = angle
    bound = bind_gates(problem._routed_excitation(k), parameters)
    return _apply_bound(state, bound)


def _sweep_incremental(problem, theta, tracker):
    """First pass from the zero start: grow the state generator by
    generator, fitting the one-dimensional energy curve of each from
    incremental samples."""
    state = _apply_bound(
        _fresh_state(problem), bind_gates(problem._routed_reference())
    )
    current = _measure_energy(problem, state)
    tracker.record(current, theta)
    floor = _gain_floor(problem)
    gains = np.zeros(problem.n_parameters)
    for k in range(problem.n_parameters):
        samples = [current]
        for offset in _TRIG_OFFSETS[1:]:
            trial = _apply_excitation(problem, state.copy(), k, float(offset))
            samples.append(_measure_energy(problem, trial))
            tracker.count()
        best_angle, predicted = _trig_minimum(_trig_fit(samples))
        if current - predicted <= floor or abs(best_angle) < 1e-12:
            continue
        trial = _apply_excitation(problem, state.copy(), k, best_angle)
        new_energy = _measure_energy(problem, trial)
        tracker.count()
        if new_energy < current:
            gains[k] = current - new_energy
            state = trial
            theta[k] = best_angle
            current = new_energy
            tracker.record(current, theta)
        tracker.bump_truncation(state.accumulated_truncation_error)
    return current, gains


def _sweep_refine(problem, theta, current, order, workers, tracker, local=False):
    """One exact coordinate-descent pass over the coordinates in ``order``.

    The energy along a single excitation parameter is exactly a
    degree-two trigonometric polynomial, so five full evaluations pin
    each slice and its minimiser in closed form, and every accepted move
    is applied immediately.  ``local`` restricts moves to the nearest
    minimum of the slice, which keeps a warm start on its own solution
    branch.  The returned energy comes from one fresh evaluation so fit
    round-off cannot accumulate across passes.
    """
    floor = _gain_floor(problem)
    pick = _trig_nearest_minimum if local else _trig_minimum
    moved = False
    for k in order:
        samples = [current]
        for offset in _TRIG_OFFSETS[1:]:
            probe = theta.copy()
            probe[k] += float(offset)
            energy, truncation = _evaluate(problem, probe, workers)
            tracker.count()
            tracker.bump_truncation(truncation)
            samples.append(energy)
        delta, predicted = pick(_trig_fit(samples))
        if current - predicted > floor and abs(delta) > 1e-12:
            theta[k] += delta
            current = predicted
            moved = True
    if moved:
        current, truncation = _evaluate(problem, theta, workers)
        tracker.count()
        tracker.bump_truncation(truncation)
        tracker.record(current, theta)
    return current


def _line_minimize(problem, theta, direction, current, workers, tracker):
    """Exact-evaluation Brent search along ``direction`` from ``theta``.

    Returns ``(energy, t)`` for the best accepted step ``t * direction``,
    with ``t = 0`` when no point on the line beats ``current``.
    """

    def objective(t):
        energy, truncation = _evaluate(problem, theta + t * direction, workers)
        tracker.count()
        tracker.bump_truncation(truncation)
        return energy

    try:
        res = scipy.optimize.minimize_scalar(
            objective,
            bracket=(0.0, 1.0),
            method="brent",
            options={"xtol": 1e-11, "maxiter": 60},
        )
    except RuntimeError:
        # no downhill bracket along this direction
        return current, 0.0
    if np.isfinite(res.fun) and res.fun < current:
        return float(res.fun), float(res.x)
    return current, 0.0


class _Tracker:
    """Accepted-step history plus evaluation and truncation accounting."""

    def __init__(self):
        self.history = []
        self.best_energy = np.inf
        self.best_theta = None
        self.n_evaluations = 0
        self.truncation_max = 0.0

    def record(self, energy, theta):
        if not np.isfinite(energy):
            raise NumericalError(f"non-finite energy at theta={np.asarray(theta)}")
        self.history.append(float(energy))
        if energy < self.best_energy:
            self.best_energy = float(energy)
            self.best_theta = np.array(theta, dtype=float)

    def count(self):
        self.n_evaluations += 1

    def bump_truncation(self, value):
        self.truncation_max = max(self.truncation_max, value)


def _minimize_sweep(problem, theta0, workers):
    theta = np.array(theta0, dtype=float)
    tracker = _Tracker()
    iterations = 0

    # a warm start is a continuation problem: stay on the given branch
    local = not np.all(theta == 0.0)
    if local:
        current, truncation = _evaluate(problem, theta, workers)
        tracker.count()
        tracker.bump_truncation(truncation)
        tracker.record(current, theta)
    else:
        current, _ = _sweep_incremental(problem, theta, tracker)
        iterations = 1
    order = list(range(problem.n_parameters))

    converged = False
    while iterations < problem.max_iterations:
        before = current
        start = theta.copy()
        current = _sweep_refine(
            problem, theta, current, order, workers, tracker, local=local
        )
        # pattern step: coordinate moves crawl along soft collective
        # directions (their per-coordinate gains vanish long before the
        # true minimum), but their summed displacement points down the
        # valley, so one exact line search along it recovers the progress
        direction = theta - start
        if np.any(direction != 0.0):
            current, step = _line_minimize(
                problem, theta, direction, current, workers, tracker
            )
            if step != 0.0:
                theta += step * direction
                tracker.record(current, theta)
        iterations += 1
        moved = float(np.linalg.norm(theta - start))
        if before - current < problem.energy_tolerance and moved < problem.parameter_tolerance:
            converged = True
            break

    return VqeResult(
        energy=tracker.best_energy,
        parameters=tracker.best_theta if tracker.best_theta is not None else theta,
        iterations=iterations,
        energy_history=tracker.history,
        truncation_error_max=tracker.truncation_max,
        converged=converged,
        n_evaluations=tracker.n_evaluations,
    )


# -- scipy-backed optimisers -------------------------------------------------


def _scipy_objective(problem, workers, tracker):
    def objective(theta):
        energy, truncation = _evaluate(problem, theta, workers)
        tracker.count()
        tracker.bump_truncation(truncation)
        if not np.isfinite(energy):
            raise NumericalError(f"non-finite energy at theta={np.asarray(theta)}")
        if energy < tracker.best_energy:
            tracker.record(energy, theta)
        return energy

    return objective


def _minimize_simplex(problem, theta0, workers):
    tracker = _Tracker()
    objective = _scipy_objective(problem, workers, tracker)
    bounds = [(-np.pi, np.pi)] * problem.n_parameters
    result = scipy.optimize.minimize(
        objective,
        theta0,
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "maxiter": problem.max_iterations,
            "fatol": problem.energy_tolerance,
            "xatol": problem.parameter_tolerance,
            "disp": False,
        },
    )
    return VqeResult(
        energy=tracker.best_energy,
        parameters=tracker.best_theta,
        iterations=int(result.nit),
        energy_history=tracker.history,
        truncation_error_max=tracker.truncation_max,
        converged=bool(result.success),
        n_evaluations=tracker.n_evaluations,
    )


def _minimize_lbfgs(problem, theta0, workers):
    tracker = _Tracker()
    objective = _scipy_objective(problem, workers, tracker)

    def gradient(theta):
        step = problem.fd_step
        grad = np.zeros_like(theta)
        for k in range(theta.size):
            plus = theta.copy()
            minus = theta.copy()
            plus[k] += step
            minus[k] -= step
            e_plus, _ = _evaluate(problem, plus, workers)
            e_minus, _ = _evaluate(problem, minus, workers)
            tracker.count()
            tracker.count()
            grad[k] = (e_plus - e_minus) / (2.0 * step)
        return grad

    result = scipy.optimize.minimize(
        objective,
        theta0,
        method="L-BFGS-B",
        jac=gradient,
        options={"maxiter": problem.max_iterations, "ftol": problem.energy_tolerance},
    )
    return VqeResult(
        energy=tracker.best_energy,
        parameters=tracker.best_theta,
        iterations=int(result.nit),
        energy_history=tracker.history,
        truncation_error_max=tracker.truncation_max,
        converged=bool(result.success),
        n_evaluations=tracker.n_evaluations,
    )


def minimize(problem, theta0=None, workers=1):
    """Minimise the problem energy from ``theta0`` (zeros by default)."""
    if theta0 is None:
        theta0 = np.zeros(problem.n_parameters)
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (problem.n_parameters,):
        raise ValueError(
            f"expected {problem.n_parameters} starting parameters, got {theta0.shape}"
        )
    if problem.optimizer == "sweep":
        return _minimize_sweep(problem, theta0, workers)
    if problem.optimizer == "nelder-mead":
        return _minimize_simplex(problem, theta0, workers)
    return _minimize_lbfgs(problem, theta0, workers)
