"""Command line front end: VQE and DMET runs, transforms, benchmarks.

Batch-oriented: every command reads plain JSON configuration, writes
JSON/CSV result files into ``--out-dir``, and reports through exit
codes.  Outputs carry no timestamps, so a rerun with the same config
and seed reproduces the same bytes (benchmark timings are the one
declared exception: the measured seconds are the payload).

Exit codes, shared by all commands:

====  ==========================================================
   0  success (for solver runs: converged)
   2  configuration or input parsing problem (bad JSON, missing
      fields, malformed bundle, invalid fragment specification)
   3  mean-field SCF did not converge
   4  variational solver failed or did not converge
   5  embedding failure (no chemical-potential bracket)
====  ==========================================================
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import EmbeddingError, NumericalError, ScfConvergenceError
from .dmet import dmet_run
from .integrals import parse_fcidump
from .mps import MpsState
from .operators import jordan_wigner, molecular_hamiltonian
from .vqe import minimize, problem_from_bundle

__all__ = ["cmd_vqe", "cmd_dmet", "cmd_bench_scaling", "cmd_jw", "main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SCF = 3
EXIT_SOLVER = 4
EXIT_EMBEDDING = 5

_VQE_KEYS = {
    "bundle",
    "max_bond",
    "svd_cutoff",
    "measurement_mode",
    "optimizer",
    "max_iterations",
    "energy_tolerance",
    "parameter_tolerance",
    "fd_step",
    "shared_ansatz",
    "scheduling",
    "prune",
}

_DMET_KEYS = {
    "bundle",
    "fragments",
    "solver",
    "max_bond",
    "svd_cutoff",
    "electron_tolerance",
    "mu_bounds",
    "max_mu_evaluations",
}


def _load_config(path, allowed):
    try:
        with open(path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ValueError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ValueError(f"config {path} must hold a JSON object")
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise ValueError(f"unknown config fields {unknown}")
    if "bundle" not in config:
        raise ValueError("config missing required field 'bundle'")
    # bundle paths resolve against the config file, so configs relocate
    base = os.path.dirname(os.path.abspath(path))
    config["bundle"] = os.path.normpath(os.path.join(base, config["bundle"]))
    return config


def _write_json(out_dir, name, payload):
    os.makedirs(out_dir, exist_ok=True)
    target = os.path.join(out_dir, name)
    with open(target, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return target


def _write_csv(out_dir, name, header, rows):
    os.makedirs(out_dir, exist_ok=True)
    target = os.path.join(out_dir, name)
    with open(target, "w") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(str(item) for item in row) + "\n")
    return target


def cmd_vqe(config, out_dir=".", workers=1, seed=None, max_bond=None,
            measurement_mode=None):
    """Run one variational ground-state job from a JSON config.

    Writes ``vqe_result.json`` and ``energy_history.csv``; returns the
    exit code (0 only when the optimizer reported convergence).
    """
    settings = _load_config(config, _VQE_KEYS)
    bundle = parse_fcidump(settings.pop("bundle"))
    if max_bond is not None:
        settings["max_bond"] = int(max_bond)
    if measurement_mode is not None:
        settings["measurement_mode"] = measurement_mode
    prune = settings.pop("prune", 1e-10)
    problem = problem_from_bundle(bundle, prune=prune, **settings)
    result = minimize(problem, workers=max(1, int(workers or 1)))

    payload = {
        "n_qubits": problem.hamiltonian.n_qubits,
        "n_parameters": problem.n_parameters,
        "energy": result.energy,
        "rhf_energy": problem.metadata["rhf_energy"],
        "converged": result.converged,
        "iterations": result.iterations,
        "n_evaluations": result.n_evaluations,
        "truncation_error_max": result.truncation_error_max,
        "max_bond": problem.max_bond,
        "measurement_mode": problem.measurement_mode,
        "optimizer": problem.optimizer,
        "seed": seed,
        "parameters": [float(p) for p in result.parameters],
    }
    _write_json(out_dir, "vqe_result.json", payload)
    _write_csv(
        out_dir,
        "energy_history.csv",
        ("iteration", "energy"),
        [(i, repr(float(e))) for i, e in enumerate(result.energy_history)],
    )
    print(f"vqe: energy {result.energy:+.10f} after {result.iterations} sweeps "
          f"({result.n_evaluations} evaluations)")
    if not result.converged:
        print("vqe: optimizer did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_dmet(config, out_dir=".", workers=1, seed=None, max_bond=None,
             solver=None):
    """Run one embedding job from a JSON config.

    Writes ``dmet_result.json`` plus ``fragment_records.csv`` and
    returns the exit code.
    """
    settings = _load_config(config, _DMET_KEYS)
    bundle = parse_fcidump(settings.pop("bundle"))
    if max_bond is not None:
        settings["max_bond"] = int(max_bond)
    if solver is not None:
        settings["solver"] = solver
    if "mu_bounds" in settings:
        bounds = settings["mu_bounds"]
        if not (isinstance(bounds, (list, tuple)) and len(bounds) == 2):
            raise ValueError("config field 'mu_bounds' must be a two-entry list")
        settings["mu_bounds"] = (float(bounds[0]), float(bounds[1]))
    state = dmet_run(bundle, workers=max(1, int(workers or 1)), **settings)

    records = [
        (
            index,
            " ".join(str(p) for p in fragment.orbital_indices),
            repr(float(energy)),
            repr(float(count)),
            repr(float(solver_energy)),
        )
        for index, (fragment, energy, count, solver_energy) in enumerate(
            zip(
                state.fragments,
                state.fragment_energies,
                state.metadata["fragment_electron_counts"],
                state.metadata["solver_energies"],
            )
        )
    ]
    payload = {
        "n_orbitals": bundle.n_orbitals,
        "n_electrons": bundle.n_electrons,
        "fragments": [list(f.orbital_indices) for f in state.fragments],
        "solver": state.metadata["solver"],
        "total_energy": state.total_energy,
        "hf_energy": state.mean_field.hf_energy,
        "chemical_potential": state.chemical_potential,
        "total_electron_count": state.total_electron_count,
        "electron_residual": state.metadata["electron_residual"],
        "n_mu_evaluations": state.n_mu_evaluations,
        "fragment_energies": [float(e) for e in state.fragment_energies],
        "fragment_electron_counts": [
            float(n) for n in state.metadata["fragment_electron_counts"]
        ],
        "seed": seed,
    }
    _write_json(out_dir, "dmet_result.json", payload)
    _write_csv(
        out_dir,
        "fragment_records.csv",
        ("fragment", "orbitals", "energy", "electron_count", "solver_energy"),
        records,
    )
    print(f"dmet: energy {state.total_energy:+.10f} at mu "
          f"{state.chemical_potential:+.6f} "
          f"({state.n_mu_evaluations} potential evaluations)")
    return EXIT_OK


def cmd_jw(bundle_path, out_dir=".", prune=1e-12):
    """Transform a bundle to its qubit Hamiltonian and report the size.

    Writes ``pauli_sum.json`` holding the full expansion.
    """
    bundle = parse_fcidump(bundle_path)
    op, constant = molecular_hamiltonian(bundle.h, bundle.eri, bundle.core_energy)
    hamiltonian = jordan_wigner(op, n_modes=bundle.n_spin_orbitals, prune=prune)
    hamiltonian.constant += constant
    payload = hamiltonian.to_dict()
    payload["n_terms"] = hamiltonian.n_terms
    _write_json(out_dir, "pauli_sum.json", payload)
    print(f"{hamiltonian.n_terms} Pauli terms on {hamiltonian.n_qubits} qubits")
    return EXIT_OK


def _entangler_gates(n_qubits, layers, rng):
    """Brick pattern: three nearest-neighbour unitaries per 4-qubit window.

    Window starts alternate between 0 and 2 (mod 4) across layers, so
    entanglement spreads while the gate count stays exactly linear in
    the qubit count.
    """
    gates = []
    for layer in range(layers):
        offset = 2 * (layer % 2)
        for start in range(offset, n_qubits - 3, 4):
            for q in (start, start + 1, start + 2):
                z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
                unitary, _ = np.linalg.qr(z)
                gates.append((q, unitary))
    return gates


def _best_time(n_qubits, gates, max_bond, repeats):
    best = None
    for _ in range(repeats):
        state = MpsState.product_state("0" * n_qubits, max_bond=max_bond,
                                       svd_cutoff=0.0)
        start = time.perf_counter()
        for q, matrix in gates:
            state.apply_gate(matrix, (q, q + 1))
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


def cmd_bench_scaling(sizes, max_bond=64, layers=16, repeats=3, seed=0,
                      out_dir="."):
    """Time fixed-depth entangling circuits across register widths.

    Writes ``bench_scaling.csv`` with one ``(n_qubits, seconds)`` row
    per size; with two or more distinct sizes also fits a line and
    writes ``bench_fit.json`` with its slope, intercept and R².  The
    circuits are seed-deterministic; the measured seconds are not.
    """
    sizes = sorted(int(n) for n in sizes)
    if not sizes or any(n < 4 for n in sizes):
        raise ValueError("benchmark sizes must be integers of at least 4 qubits")
    rows = []
    for n in sizes:
        rng = np.random.default_rng(seed)
        gates = _entangler_gates(n, layers, rng)
        seconds = _best_time(n, gates, max_bond, repeats)
        rows.append((n, seconds))
        print(f"bench: {n:3d} qubits  {len(gates):4d} gates  {seconds:8.3f} s")
    _write_csv(out_dir, "bench_scaling.csv", ("n_qubits", "seconds"),
               [(n, repr(s)) for n, s in rows])

    if len(set(n for n, _ in rows)) < 2:
        print("bench: single size, no fit")
        return EXIT_OK
    x = np.array([n for n, _ in rows], dtype=float)
    y = np.array([s for _, s in rows])
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    total = np.sum((y - y.mean()) ** 2)
    r_squared = 1.0 - float(np.sum((y - predicted) ** 2) / total) if total > 0 else 1.0
    _write_json(out_dir, "bench_fit.json", {
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": r_squared,
        "max_bond": int(max_bond),
        "layers": int(layers),
        "seed": seed,
    })
    print(f"bench: fit seconds = {intercept:.4f} + {slope:.5f} * n_qubits,"
          f" r_squared = {r_squared:.4f}")
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mpsvqe",
        description="matrix-product-state chemistry driver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    vqe = sub.add_parser("vqe", help="variational ground-state run")
    vqe.add_argument("--config", required=True)
    vqe.add_argument("--out-dir", default=".")
    vqe.add_argument("--workers", type=int, default=None)
    vqe.add_argument("--seed", type=int, default=None)
    vqe.add_argument("--max-bond", type=int, default=None)
    vqe.add_argument("--measurement-mode", choices=["direct", "hadamard_test"],
                     default=None)

    dmet = sub.add_parser("dmet", help="density-matrix embedding run")
    dmet.add_argument("--config", required=True)
    dmet.add_argument("--out-dir", default=".")
    dmet.add_argument("--workers", type=int, default=None)
    dmet.add_argument("--seed", type=int, default=None)
    dmet.add_argument("--max-bond", type=int, default=None)
    dmet.add_argument("--solver", choices=["mps-vqe", "fci"], default=None)

    jw = sub.add_parser("jw", help="bundle to qubit Hamiltonian")
    jw.add_argument("bundle")
    jw.add_argument("--out-dir", default=".")

    bench = sub.add_parser("bench-scaling", help="per-circuit timing vs width")
    bench.add_argument("--sizes", default="12,24,36,48,60",
                       help="comma-separated qubit counts")
    bench.add_argument("--max-bond", type=int, default=64)
    bench.add_argument("--layers", type=int, default=16)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out-dir", default=".")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    workers = getattr(args, "workers", None)
    if workers is None:
        workers = os.cpu_count() or 1
    try:
        if args.command == "vqe":
            return cmd_vqe(args.config, out_dir=args.out_dir, workers=workers,
                           seed=args.seed, max_bond=args.max_bond,
                           measurement_mode=args.measurement_mode)
        if args.command == "dmet":
            return cmd_dmet(args.config, out_dir=args.out_dir, workers=workers,
                            seed=args.seed, max_bond=args.max_bond,
                            solver=args.solver)
        if args.command == "jw":
            return cmd_jw(args.bundle, out_dir=args.out_dir)
        if args.command == "bench-scaling":
            sizes = [part for part in args.sizes.split(",") if part.strip()]
            return cmd_bench_scaling(sizes, max_bond=args.max_bond,
                                     layers=args.layers, repeats=args.repeats,
                                     seed=args.seed, out_dir=args.out_dir)
        raise ValueError(f"unknown command {args.command!r}")
    except ScfConvergenceError as exc:
        print(f"mpsvqe: SCF failure: {exc}", file=sys.stderr)
        return EXIT_SCF
    except EmbeddingError as exc:
        print(f"mpsvqe: embedding failure: {exc}", file=sys.stderr)
        return EXIT_EMBEDDING
    except NumericalError as exc:
        print(f"mpsvqe: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, KeyError, OSError) as exc:
        print(f"mpsvqe: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
