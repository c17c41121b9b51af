"""Determinant-basis full CI for reference energies.

Bitmask alpha/beta strings, excitation operators assembled as sparse
triplets, ground state from dense diagonalization or ARPACK Lanczos.
Exact but intended for small orbital counts (the bundled molecules top out
at a 63504-dimensional spin sector).
"""

import itertools

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def _strings(n_orb, n_occ):
    masks = [sum(1 << o for o in occ)
             for occ in itertools.combinations(range(n_orb), n_occ)]
    return np.sort(np.array(masks, dtype=np.int64))


def _excitations(strings, n_orb):
    """Triplets (rows, cols, vals) of a+_p a_q for every (p, q) pair."""
    index = {int(s): i for i, s in enumerate(strings)}
    out = {}
    for p in range(n_orb):
        for q in range(n_orb):
            if p == q:
                occ = (strings >> q) & 1 == 1
                idx = np.nonzero(occ)[0].astype(np.int32)
                out[p, q] = (idx, idx, np.ones(len(idx)))
                continue
            occ_q = (strings >> q) & 1 == 1
            emp_p = (strings >> p) & 1 == 0
            sel = np.nonzero(occ_q & emp_p)[0]
            src = strings[sel]
            mid = src & ~(np.int64(1) << q)
            dst = mid | (np.int64(1) << p)
            sign_q = np.bitwise_count(src & ((np.int64(1) << q) - 1))
            sign_p = np.bitwise_count(mid & ((np.int64(1) << p) - 1))
            vals = np.where((sign_q + sign_p) % 2 == 0, 1.0, -1.0)
            rows = np.array([index[int(d)] for d in dst], dtype=np.int32)
            out[p, q] = (rows, sel.astype(np.int32), vals)
    return out


def _coulomb_triplets(exc, eri, p, q):
    """Triplets of sum_rs (pq|rs) a+_r a_s over one spin's strings."""
    rows, cols, vals = [], [], []
    n = eri.shape[0]
    for r in range(n):
        for s in range(n):
            g = eri[p, q, r, s]
            if abs(g) < 1e-14:
                continue
            er, ec, ev = exc[r, s]
            rows.append(er)
            cols.append(ec)
            vals.append(g * ev)
    if not rows:
        z = np.zeros(0, dtype=np.int32)
        return z, z, np.zeros(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def _same_spin_h(exc, h, eri, dim):
    rows, cols, vals = [], [], []
    n = h.shape[0]
    for p in range(n):
        for q in range(n):
            er, ec, ev = exc[p, q]
            if abs(h[p, q]) > 1e-14:
                rows.append(er)
                cols.append(ec)
                vals.append(h[p, q] * ev)
    hmat = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows),
                                                 np.concatenate(cols))),
                         shape=(dim, dim)).tocsr()
    kcorr = np.einsum("pqqs->ps", eri)
    for p in range(n):
        for q in range(n):
            e_pq = sp.coo_matrix((exc[p, q][2], (exc[p, q][0], exc[p, q][1])),
                                 shape=(dim, dim)).tocsr()
            gr, gc, gv = _coulomb_triplets(exc, eri, p, q)
            g_pq = sp.coo_matrix((gv, (gr, gc)), shape=(dim, dim)).tocsr()
            hmat = hmat + 0.5 * (e_pq @ g_pq)
            if abs(kcorr[p, q]) > 1e-14:
                hmat = hmat - 0.5 * kcorr[p, q] * e_pq
    return hmat.tocoo()


def fci_ground_energy(h, eri, n_alpha, n_beta, return_vector=False):
    """Lowest eigenvalue of the electronic Hamiltonian in the (Na, Nb) sector.

    h: one-electron matrix, eri: chemists' (pq|rs), both in an orthonormal
    orbital basis. Returns the electronic energy (no nuclear term).
    """
    n = h.shape[0]
    str_a = _strings(n, n_alpha)
    str_b = str_a if n_beta == n_alpha else _strings(n, n_beta)
    na, nb = len(str_a), len(str_b)
    exc_a = _excitations(str_a, n)
    exc_b = exc_a if str_b is str_a else _excitations(str_b, n)

    rows, cols, vals = [], [], []

    def add_kron(ar, ac, av, br, bc, bv):
        rows.append((ar[:, None] * np.int64(nb) + br[None, :]).ravel())
        cols.append((ac[:, None] * np.int64(nb) + bc[None, :]).ravel())
        vals.append((av[:, None] * bv[None, :]).ravel())

    ha = _same_spin_h(exc_a, h, eri, na)
    hb = ha if exc_b is exc_a and nb == na else _same_spin_h(exc_b, h, eri, nb)
    eye_a = np.arange(na, dtype=np.int64)
    eye_b = np.arange(nb, dtype=np.int64)
    add_kron(ha.row.astype(np.int64), ha.col.astype(np.int64), ha.data,
             eye_b, eye_b, np.ones(nb))
    add_kron(eye_a, eye_a, np.ones(na),
             hb.row.astype(np.int64), hb.col.astype(np.int64), hb.data)
    for p in range(n):
        for q in range(n):
            ar, ac, av = exc_a[p, q]
            if len(ar) == 0:
                continue
            br, bc, bv = _coulomb_triplets(exc_b, eri, p, q)
            if len(br) == 0:
                continue
            add_kron(ar.astype(np.int64), ac.astype(np.int64), av,
                     br.astype(np.int64), bc.astype(np.int64), bv)

    dim = na * nb
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    if dim <= 1200:
        hmat = np.zeros((dim, dim))
        np.add.at(hmat, (rows, cols), vals)
        w, v = np.linalg.eigh(hmat)
        return (w[0], v[:, 0]) if return_vector else w[0]
    hmat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    del rows, cols, vals
    v0 = np.zeros(dim)
    v0[0] = 1.0  # lowest-orbital determinant
    w, v = spla.eigsh(hmat, k=1, which="SA", v0=v0, maxiter=10000)
    return (w[0], v[:, 0]) if return_vector else w[0]
