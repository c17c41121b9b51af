"""Bundle generation: integrals in an orthonormal basis + reference metadata.

A bundle is an FCIDUMP file (chemists' (ij|kl), eightfold symmetry, 1-based
indices, trailing constant line carrying the nuclear repulsion) together
with a JSON metadata file holding the geometry, counts, and RHF/FCI
reference energies computed with the built-in backend.
"""

import json
from pathlib import Path

import numpy as np
from scipy import linalg

from .basis import NUCLEAR_CHARGE, build_basis
from .ci import fci_ground_energy
from .geometry import BOHR_PER_ANGSTROM, electron_count, parse_geometry
from .integrals import (eri_tensor, kinetic_matrix, nuclear_matrix,
                        nuclear_repulsion, overlap_matrix)
from .scf import rhf

LOCALIZATIONS = ("molecular-orbital", "orthogonal-atomic")
FCI_ORBITAL_LIMIT = 16
_VERSION = "0.1.0"


def write_fcidump(path, h, eri, n_electrons, core_energy, ms2=0):
    n = h.shape[0]
    pair = lambda i, j: i * (i + 1) // 2 + j
    with open(path, "w") as fh:
        fh.write(" &FCI NORB=%3d,NELEC=%3d,MS2=%d,\n" % (n, n_electrons, ms2))
        fh.write("  ORBSYM=" + "1," * n + "\n")
        fh.write("  ISYM=1,\n")
        fh.write(" &END\n")
        line = "%23.16E %4d %4d %4d %4d\n"
        for i in range(n):
            for j in range(i + 1):
                for k in range(n):
                    for l in range(k + 1):
                        if pair(k, l) > pair(i, j):
                            continue
                        v = eri[i, j, k, l]
                        if abs(v) > 1e-14:
                            fh.write(line % (v, i + 1, j + 1, k + 1, l + 1))
        for i in range(n):
            for j in range(i + 1):
                if abs(h[i, j]) > 1e-14:
                    fh.write(line % (h[i, j], i + 1, j + 1, 0, 0))
        fh.write(line % (core_energy, 0, 0, 0, 0))


def _transform(h, eri, c):
    h2 = c.T @ h @ c
    eri2 = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, c, c, c, c, optimize=True)
    return h2, eri2


def gen_bundle(geometry, localization="molecular-orbital", basis="sto-3g",
               out_dir=".", name="molecule"):
    """Generate <name>.fcidump and <name>.json under out_dir.

    geometry: geometry text (see geometry.parse_geometry).
    localization: 'molecular-orbital' (canonical RHF orbitals) or
    'orthogonal-atomic' (symmetric Lowdin orthogonalization, atom-local).
    Returns the metadata dict.
    """
    if localization not in LOCALIZATIONS:
        raise ValueError("localization must be one of %s" % (LOCALIZATIONS,))
    charge, atoms = parse_geometry(geometry)
    n_elec = electron_count(charge, atoms)
    funcs = build_basis(atoms, basis)
    zc = [(NUCLEAR_CHARGE[sym], xyz) for sym, xyz in atoms]

    s = overlap_matrix(funcs)
    hcore = kinetic_matrix(funcs) + nuclear_matrix(funcs, zc)
    eri = eri_tensor(funcs)
    e_nuc = nuclear_repulsion(zc)

    e_scf, mo_coeff, _ = rhf(s, hcore, eri, n_elec)
    if localization == "molecular-orbital":
        c = mo_coeff
    else:
        w, v = linalg.eigh(s)
        c = v @ np.diag(w ** -0.5) @ v.T
    h_t, eri_t = _transform(hcore, eri, c)

    n_orb = h_t.shape[0]
    meta = {
        "name": name,
        "basis": basis,
        "localization": localization,
        "geometry_angstrom": [[sym, *np.round(xyz / BOHR_PER_ANGSTROM, 10)]
                              for sym, xyz in atoms],
        "charge": charge,
        "n_orbitals": n_orb,
        "n_electrons": n_elec,
        "nuclear_repulsion": e_nuc,
        "rhf_energy": e_scf + e_nuc,
        "generator": "integrals-gen",
        "version": _VERSION,
        "format": 1,
    }
    if n_orb <= FCI_ORBITAL_LIMIT:
        e_fci = fci_ground_energy(h_t, eri_t, n_elec // 2, n_elec - n_elec // 2)
        meta["fci_energy"] = e_fci + e_nuc

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_fcidump(out / (name + ".fcidump"), h_t, eri_t, n_elec, e_nuc)
    with open(out / (name + ".json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return meta
