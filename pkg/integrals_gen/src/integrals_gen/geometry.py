"""Plain-text molecular geometry parsing.

Format: optional "charge <int>" line, then one "<symbol> <x> <y> <z>" line
per atom with coordinates in angstrom. Blank lines and lines starting with
'#' are ignored.
"""

import numpy as np
from scipy import constants

from .basis import NUCLEAR_CHARGE

BOHR_PER_ANGSTROM = 1e-10 / constants.physical_constants["Bohr radius"][0]


def parse_geometry(text):
    """Return (charge, [(symbol, xyz_bohr)])."""
    charge = 0
    atoms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].lower() == "charge":
            if atoms:
                raise ValueError("line %d: charge must precede atoms" % lineno)
            charge = int(parts[1])
            continue
        if len(parts) != 4:
            raise ValueError("line %d: expected 'symbol x y z', got %r" % (lineno, raw))
        symbol = parts[0].capitalize()
        if symbol not in NUCLEAR_CHARGE:
            raise ValueError("line %d: unknown element %r" % (lineno, parts[0]))
        xyz = np.array([float(p) for p in parts[1:]]) * BOHR_PER_ANGSTROM
        atoms.append((symbol, xyz))
    if not atoms:
        raise ValueError("geometry contains no atoms")
    return charge, atoms


def electron_count(charge, atoms):
    return sum(NUCLEAR_CHARGE[s] for s, _ in atoms) - charge
