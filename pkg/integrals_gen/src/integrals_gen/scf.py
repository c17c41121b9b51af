"""Restricted Hartree-Fock in the raw atomic-orbital basis (non-orthogonal)."""

import numpy as np
from scipy import linalg


class ScfError(RuntimeError):
    pass


def rhf(s, hcore, eri, n_electrons, max_cycles=200, conv_tol=1e-11,
        diis_size=8):
    """Closed-shell SCF with DIIS; returns (energy_electronic, mo_coeff, mo_energy).

    Density matrix convention: D = 2 C_occ C_occ^T (trace = electron count).
    """
    if n_electrons % 2:
        raise ScfError("RHF needs an even electron count, got %d" % n_electrons)
    nocc = n_electrons // 2

    def fock(d):
        j = np.einsum("pqrs,rs->pq", eri, d, optimize=True)
        k = np.einsum("prqs,rs->pq", eri, d, optimize=True)
        return hcore + j - 0.5 * k

    def energy(d, f):
        return 0.5 * np.einsum("pq,pq->", d, hcore + f)

    mo_energy, c = linalg.eigh(hcore, s)
    d = 2.0 * c[:, :nocc] @ c[:, :nocc].T
    e_old = 0.0
    errs, focks = [], []
    for cycle in range(max_cycles):
        f = fock(d)
        # DIIS on the AO-basis gradient FDS - SDF
        grad = f @ d @ s - s @ d @ f
        errs.append(grad.ravel())
        focks.append(f)
        if len(errs) > diis_size:
            errs.pop(0)
            focks.pop(0)
        if len(errs) > 1:
            m = len(errs)
            b = -np.ones((m + 1, m + 1))
            b[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    b[i, j] = errs[i] @ errs[j]
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(b, rhs)[:m]
                f = sum(wi * fi for wi, fi in zip(w, focks))
            except np.linalg.LinAlgError:
                pass
        mo_energy, c = linalg.eigh(f, s)
        d = 2.0 * c[:, :nocc] @ c[:, :nocc].T
        f_new = fock(d)
        e = energy(d, f_new)
        g_norm = np.abs(f_new @ d @ s - s @ d @ f_new).max()
        if abs(e - e_old) < conv_tol and g_norm < 1e-8:
            # canonical sign: largest-magnitude coefficient positive
            for k in range(c.shape[1]):
                if c[np.argmax(np.abs(c[:, k])), k] < 0:
                    c[:, k] = -c[:, k]
            return e, c, mo_energy
        e_old = e
    raise ScfError("SCF did not converge in %d cycles (|grad|=%.2e)"
                   % (max_cycles, g_norm))
