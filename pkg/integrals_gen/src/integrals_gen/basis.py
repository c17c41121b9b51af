"""STO-3G basis data and contracted Gaussian construction.

Exponents and contraction coefficients are the standard published STO-3G
values (coefficients refer to unit-normalized primitives). Only the elements
needed by the bundled molecule set are tabulated.
"""

import numpy as np

NUCLEAR_CHARGE = {"H": 1, "Li": 3, "O": 8}

# symbol -> list of shells; each shell is (kind, exponents, {kind: coeffs})
# 'sp' shells share exponents between the s and the three p functions.
STO3G = {
    "H": [
        ("s", [3.42525091, 0.62391373, 0.16885540],
         {"s": [0.15432897, 0.53532814, 0.44463454]}),
    ],
    "Li": [
        ("s", [16.1195750, 2.9362007, 0.7946505],
         {"s": [0.15432897, 0.53532814, 0.44463454]}),
        ("sp", [0.6362897, 0.1478601, 0.0480887],
         {"s": [-0.09996723, 0.39951283, 0.70011547],
          "p": [0.15591627, 0.60768372, 0.39195739]}),
    ],
    "O": [
        ("s", [130.7093200, 23.8088610, 6.4436083],
         {"s": [0.15432897, 0.53532814, 0.44463454]}),
        ("sp", [5.0331513, 1.1695961, 0.3803890],
         {"s": [-0.09996723, 0.39951283, 0.70011547],
          "p": [0.15591627, 0.60768372, 0.39195739]}),
    ],
}


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(alpha, lmn):
    l, m, n = lmn
    pref = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = np.sqrt(float(_double_factorial(2 * l - 1)
                        * _double_factorial(2 * m - 1)
                        * _double_factorial(2 * n - 1)))
    return pref / den


class BasisFunction:
    """One contracted cartesian Gaussian: sum_k c_k x^l y^m z^n exp(-a_k r^2)."""

    def __init__(self, center, lmn, exponents, coefficients):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exponents = np.asarray(exponents, dtype=float)
        coeffs = np.asarray(coefficients, dtype=float)
        coeffs = coeffs * np.array([_primitive_norm(a, self.lmn)
                                    for a in self.exponents])
        # contraction-level normalization via the analytic self-overlap
        l, m, n = self.lmn
        L = l + m + n
        pref = (np.pi ** 1.5 * _double_factorial(2 * l - 1)
                * _double_factorial(2 * m - 1) * _double_factorial(2 * n - 1)
                / 2.0 ** L)
        s = 0.0
        for ci, ai in zip(coeffs, self.exponents):
            for cj, aj in zip(coeffs, self.exponents):
                s += ci * cj / (ai + aj) ** (L + 1.5)
        self.coefficients = coeffs / np.sqrt(pref * s)


def build_basis(atoms, basis_name="sto-3g"):
    """Expand (symbol, center_bohr) atoms into a list of BasisFunction.

    AO order: atoms in input order; within an atom, shells in tabulated
    order; within an sp shell: s, px, py, pz.
    """
    if basis_name.lower() != "sto-3g":
        raise ValueError("unsupported basis: %r (only sto-3g is built in)" % basis_name)
    funcs = []
    for symbol, center in atoms:
        if symbol not in STO3G:
            raise ValueError("no sto-3g data for element %r" % symbol)
        for kind, exps, coeffs in STO3G[symbol]:
            funcs.append(BasisFunction(center, (0, 0, 0), exps, coeffs["s"]))
            if kind == "sp":
                for lmn in [(1, 0, 0), (0, 1, 0), (0, 0, 1)]:
                    funcs.append(BasisFunction(center, lmn, exps, coeffs["p"]))
    return funcs
