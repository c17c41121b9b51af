"""Gaussian integrals over contracted cartesian functions.

Hermite-expansion (McMurchie-Davidson) evaluation of overlap, kinetic,
nuclear-attraction and electron-repulsion integrals. Adequate for s/p
shells; no screening, every unique integral is evaluated directly.
Two-electron integrals use the chemists' convention (ij|kl).
"""

from functools import lru_cache

import numpy as np
from scipy.special import hyp1f1


def boys(n, x):
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2.0 * n + 1.0)


@lru_cache(maxsize=262144)
def _hermite_e(i, j, t, qx, a, b):
    """Expansion coefficient of x^i_A x^j_B onto Hermite polynomial t; qx = Ax - Bx."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * qx * qx)
    if j == 0:
        return (_hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
                - (q * qx / a) * _hermite_e(i - 1, j, t, qx, a, b)
                + (t + 1) * _hermite_e(i - 1, j, t + 1, qx, a, b))
    return (_hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
            + (q * qx / b) * _hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) * _hermite_e(i, j - 1, t + 1, qx, a, b))


def _hermite_coulomb(t, u, v, n, p, pc, memo):
    key = (t, u, v, n)
    if key in memo:
        return memo[key]
    if t == u == v == 0:
        val = (-2.0 * p) ** n * memo["boys"][n]
    elif t > 0:
        val = (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, pc, memo) if t > 1 else 0.0
        val += pc[0] * _hermite_coulomb(t - 1, u, v, n + 1, p, pc, memo)
    elif u > 0:
        val = (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, pc, memo) if u > 1 else 0.0
        val += pc[1] * _hermite_coulomb(t, u - 1, v, n + 1, p, pc, memo)
    else:
        val = (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, pc, memo) if v > 1 else 0.0
        val += pc[2] * _hermite_coulomb(t, u, v - 1, n + 1, p, pc, memo)
    memo[key] = val
    return val


def _coulomb_memo(p, pc, nmax):
    r2 = float(pc[0] ** 2 + pc[1] ** 2 + pc[2] ** 2)
    return {"boys": [boys(n, p * r2) for n in range(nmax + 1)]}


def _overlap_prim(a, lmn1, ra, b, lmn2, rb):
    p = a + b
    s = 1.0
    for x in range(3):
        s *= _hermite_e(lmn1[x], lmn2[x], 0, ra[x] - rb[x], a, b)
    return s * (np.pi / p) ** 1.5


def _kinetic_prim(a, lmn1, ra, b, lmn2, rb):
    l2, m2, n2 = lmn2

    def ov(dl, dm, dn):
        return _overlap_prim(a, lmn1, ra, b, (l2 + dl, m2 + dm, n2 + dn), rb)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * ov(0, 0, 0)
    term1 = -2.0 * b ** 2 * (ov(2, 0, 0) + ov(0, 2, 0) + ov(0, 0, 2))
    term2 = -0.5 * (l2 * (l2 - 1) * ov(-2, 0, 0)
                    + m2 * (m2 - 1) * ov(0, -2, 0)
                    + n2 * (n2 - 1) * ov(0, 0, -2))
    return term0 + term1 + term2


def _nuclear_prim(a, lmn1, ra, b, lmn2, rb, rc):
    p = a + b
    rp = (a * ra + b * rb) / p
    pc = rp - rc
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    memo = _coulomb_memo(p, pc, l1 + l2 + m1 + m2 + n1 + n2)
    val = 0.0
    for t in range(l1 + l2 + 1):
        et = _hermite_e(l1, l2, t, ra[0] - rb[0], a, b)
        if et == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            eu = _hermite_e(m1, m2, u, ra[1] - rb[1], a, b)
            if eu == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                ev = _hermite_e(n1, n2, v, ra[2] - rb[2], a, b)
                if ev == 0.0:
                    continue
                val += et * eu * ev * _hermite_coulomb(t, u, v, 0, p, pc, memo)
    return 2.0 * np.pi / p * val


def _eri_prim(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq = rp - rq
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4
    nmax = l1 + l2 + m1 + m2 + n1 + n2 + l3 + l4 + m3 + m4 + n3 + n4
    memo = _coulomb_memo(alpha, pq, nmax)
    val = 0.0
    for t in range(l1 + l2 + 1):
        e1t = _hermite_e(l1, l2, t, ra[0] - rb[0], a, b)
        if e1t == 0.0:
            continue
        for u in range(m1 + m2 + 1):
            e1u = _hermite_e(m1, m2, u, ra[1] - rb[1], a, b)
            if e1u == 0.0:
                continue
            for v in range(n1 + n2 + 1):
                e1v = _hermite_e(n1, n2, v, ra[2] - rb[2], a, b)
                if e1v == 0.0:
                    continue
                e1 = e1t * e1u * e1v
                for tt in range(l3 + l4 + 1):
                    e2t = _hermite_e(l3, l4, tt, rc[0] - rd[0], c, d)
                    if e2t == 0.0:
                        continue
                    for uu in range(m3 + m4 + 1):
                        e2u = _hermite_e(m3, m4, uu, rc[1] - rd[1], c, d)
                        if e2u == 0.0:
                            continue
                        for vv in range(n3 + n4 + 1):
                            e2v = _hermite_e(n3, n4, vv, rc[2] - rd[2], c, d)
                            if e2v == 0.0:
                                continue
                            sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                            val += (e1 * e2t * e2u * e2v * sign
                                    * _hermite_coulomb(t + tt, u + uu, v + vv, 0,
                                                       alpha, pq, memo))
    val *= 2.0 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))
    return val


def _contract2(prim, fa, fb, *extra):
    val = 0.0
    for ca, a in zip(fa.coefficients, fa.exponents):
        for cb, b in zip(fb.coefficients, fb.exponents):
            val += ca * cb * prim(a, fa.lmn, fa.center, b, fb.lmn, fb.center, *extra)
    return val


def overlap_matrix(funcs):
    n = len(funcs)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = _contract2(_overlap_prim, funcs[i], funcs[j])
    return s


def kinetic_matrix(funcs):
    n = len(funcs)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            t[i, j] = t[j, i] = _contract2(_kinetic_prim, funcs[i], funcs[j])
    return t


def nuclear_matrix(funcs, charges_centers):
    n = len(funcs)
    v = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            val = 0.0
            for z, rc in charges_centers:
                val -= z * _contract2(_nuclear_prim, funcs[i], funcs[j], rc)
            v[i, j] = v[j, i] = val
    return v


def eri_tensor(funcs):
    """Full (ij|kl) tensor, built from the canonical eightfold-unique set."""
    n = len(funcs)
    eri = np.zeros((n, n, n, n))
    pair = lambda i, j: i * (i + 1) // 2 + j
    for i in range(n):
        for j in range(i + 1):
            ij = pair(i, j)
            for k in range(n):
                for l in range(k + 1):
                    if pair(k, l) > ij:
                        continue
                    val = 0.0
                    fi, fj, fk, fl = funcs[i], funcs[j], funcs[k], funcs[l]
                    for c1, a1 in zip(fi.coefficients, fi.exponents):
                        for c2, a2 in zip(fj.coefficients, fj.exponents):
                            for c3, a3 in zip(fk.coefficients, fk.exponents):
                                for c4, a4 in zip(fl.coefficients, fl.exponents):
                                    val += c1 * c2 * c3 * c4 * _eri_prim(
                                        a1, fi.lmn, fi.center, a2, fj.lmn, fj.center,
                                        a3, fk.lmn, fk.center, a4, fl.lmn, fl.center)
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = eri[c, d, a, b] = val
    return eri


def nuclear_repulsion(charges_centers):
    e = 0.0
    items = list(charges_centers)
    for i in range(len(items)):
        for j in range(i):
            zi, ri = items[i]
            zj, rj = items[j]
            e += zi * zj / np.linalg.norm(ri - rj)
    return e
