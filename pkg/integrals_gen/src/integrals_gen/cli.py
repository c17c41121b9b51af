"""Command line entry points for bundle generation."""

import argparse
import sys

from .bundle import gen_bundle
from .molecules import FIXTURES


def main(argv=None):
    parser = argparse.ArgumentParser(prog="integrals-gen")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-bundle", help="generate one FCIDUMP + metadata bundle")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--geometry", help="path to a geometry text file")
    src.add_argument("--builtin", choices=sorted(FIXTURES),
                     help="use a built-in fixture geometry")
    gen.add_argument("--basis", default="sto-3g")
    gen.add_argument("--localization", default="molecular-orbital",
                     choices=["molecular-orbital", "orthogonal-atomic"])
    gen.add_argument("--out-dir", default=".")
    gen.add_argument("--name", default=None)

    fix = sub.add_parser("gen-fixtures", help="regenerate the full fixture set")
    fix.add_argument("--out-dir", default="fixtures")

    args = parser.parse_args(argv)
    if args.command == "gen-bundle":
        if args.builtin:
            geometry, default_loc = FIXTURES[args.builtin]
            name = args.name or args.builtin
            loc = args.localization if "--localization" in (argv or sys.argv) else default_loc
        else:
            with open(args.geometry) as fh:
                geometry = fh.read()
            name = args.name or "molecule"
            loc = args.localization
        meta = gen_bundle(geometry, localization=loc, basis=args.basis,
                          out_dir=args.out_dir, name=name)
        print("%s: %d orbitals, %d electrons, rhf=% .10f"
              % (name, meta["n_orbitals"], meta["n_electrons"], meta["rhf_energy"]))
        if "fci_energy" in meta:
            print("%s: fci=% .10f" % (name, meta["fci_energy"]))
        return 0
    if args.command == "gen-fixtures":
        for name, (geometry, loc) in sorted(FIXTURES.items()):
            meta = gen_bundle(geometry, localization=loc,
                              out_dir=args.out_dir, name=name)
            print("%-10s rhf=% .10f fci=% .10f"
                  % (name, meta["rhf_energy"], meta.get("fci_energy", float("nan"))))
        return 0
    return 2


if __name__ == "__main__":
    sys.exit(main())
