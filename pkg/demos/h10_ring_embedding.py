"""Fragment embedding across the dissociation curve of a hydrogen ring.

Splits the ten-atom ring into five two-atom fragments, solves each
fragment-plus-bath problem with the MPS-VQE solver under a fitted global
chemical potential, and compares the assembled total energy against the
exact ground energy stored with each fixture.  The full scan over four
ring geometries takes on the order of ten minutes.

Usage:  python3 demos/h10_ring_embedding.py [--solver fci|mps-vqe]
"""

import argparse
import json
import time
from pathlib import Path

from mpsvqe import dmet_run, parse_fcidump

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
BONDS = ["0.60", "1.00", "1.40", "1.80"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--solver", default="mps-vqe",
                        choices=["fci", "mps-vqe"])
    parser.add_argument("--max-bond", type=int, default=64)
    args = parser.parse_args()

    print(f"five 2-atom fragments per ring, solver={args.solver}\n")
    print(f"{'d (A)':>6} {'E_embed (Ha)':>15} {'E_exact (Ha)':>15} "
          f"{'rel err':>9} {'mu':>10} {'time':>7}")

    for bond in BONDS:
        name = f"h10_{bond}"
        bundle = parse_fcidump(FIXTURES / f"{name}.fcidump")
        exact = json.loads((FIXTURES / f"{name}.json").read_text())["fci_energy"]
        start = time.perf_counter()
        state = dmet_run(bundle, fragments=5, solver=args.solver,
                         max_bond=args.max_bond)
        elapsed = time.perf_counter() - start
        rel = abs((state.total_energy - exact) / exact)
        print(f"{bond:>6} {state.total_energy:>15.8f} {exact:>15.8f} "
              f"{rel:>9.2e} {state.chemical_potential:>10.2e} "
              f"{elapsed:>6.1f}s")

    print("\nthe error grows with the bond length: stretched rings are more"
          "\nstrongly correlated, and a mean-field bath plus a"
          "\nsingles-and-doubles fragment solver both degrade there")


if __name__ == "__main__":
    main()
