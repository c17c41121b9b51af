"""Circuit runtime versus qubit count at fixed bond dimension.

Times randomized brick-pattern entangling circuits on chains of growing
width with the bond dimension capped at 64, then fits time against qubit
count.  At fixed bond dimension the per-gate cost is independent of the
chain length, so the total scales linearly in the number of qubits; the
fit quality makes that visible.  Takes around ten seconds.

Usage:  python3 demos/circuit_scaling.py [--sizes 12 24 36 48 60]
"""

import argparse
import json
import tempfile
from pathlib import Path

from mpsvqe.cli import cmd_bench_scaling


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[12, 24, 36, 48, 60])
    parser.add_argument("--max-bond", type=int, default=64)
    args = parser.parse_args()

    out = Path(tempfile.mkdtemp(prefix="bench-"))
    cmd_bench_scaling(args.sizes, max_bond=args.max_bond, out_dir=out)

    rows = (out / "bench_scaling.csv").read_text().strip().splitlines()[1:]
    print(f"\n{'qubits':>7} {'seconds':>9}")
    for row in rows:
        n, seconds = row.split(",")
        print(f"{n:>7} {float(seconds):>9.4f}")

    fit = json.loads((out / "bench_fit.json").read_text())
    print(f"\nlinear fit: time = {fit['slope']:.2e} * n {fit['intercept']:+.2e}"
          f"   R^2 = {fit['r_squared']:.4f}")


if __name__ == "__main__":
    main()
