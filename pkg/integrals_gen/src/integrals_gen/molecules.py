"""Canonical geometries (as geometry text) for the bundled fixture set."""

import numpy as np


def h2(d=0.7414):
    return "H 0 0 0\nH 0 0 %.10f\n" % d


def h_chain(n, spacing=1.0):
    lines = ["H 0 0 %.10f" % (i * spacing) for i in range(n)]
    return "\n".join(lines) + "\n"


def h4_chain(spacing=1.0):
    return h_chain(4, spacing)


def h6_chain(spacing=1.0):
    return h_chain(6, spacing)


def h10_ring(bond_length=1.0):
    # ten atoms on a circle with the given neighbor separation
    n = 10
    radius = bond_length / (2.0 * np.sin(np.pi / n))
    lines = []
    for k in range(n):
        theta = 2.0 * np.pi * k / n
        lines.append("H %.10f %.10f 0" % (radius * np.cos(theta),
                                          radius * np.sin(theta)))
    return "\n".join(lines) + "\n"


def lih(d=1.5949):
    return "Li 0 0 0\nH 0 0 %.10f\n" % d


def h2o(r_oh=0.9578, angle_deg=104.5):
    half = np.deg2rad(angle_deg) / 2.0
    x = r_oh * np.sin(half)
    z = r_oh * np.cos(half)
    return ("O 0 0 0\n"
            "H %.10f 0 %.10f\n"
            "H %.10f 0 %.10f\n" % (x, z, -x, z))


# name -> (geometry text, localization) for the shipped fixture set
FIXTURES = {
    "h2": (h2(), "molecular-orbital"),
    "lih": (lih(), "molecular-orbital"),
    "h2o": (h2o(), "molecular-orbital"),
    "h4": (h4_chain(), "orthogonal-atomic"),
    "h6": (h6_chain(), "orthogonal-atomic"),
    "h10_0.60": (h10_ring(0.6), "orthogonal-atomic"),
    "h10_1.00": (h10_ring(1.0), "orthogonal-atomic"),
    "h10_1.40": (h10_ring(1.4), "orthogonal-atomic"),
    "h10_1.80": (h10_ring(1.8), "orthogonal-atomic"),
}
