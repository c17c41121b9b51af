"""Electronic integral bundles and FCIDUMP interchange.

A bundle holds the one-electron matrix ``h``, the two-electron tensor
``eri`` in chemists' order ``(pq|rs)``, the electron count and a scalar
``core_energy`` (nuclear repulsion plus any constant folded in by
frozen cores or embedding).  Orbitals may be in any orthonormal basis;
:func:`rotate` changes basis and :func:`freeze_core` folds the lowest
orbitals into the constant.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import FcidumpError

__all__ = [
    "IntegralBundle",
    "parse_fcidump",
    "write_fcidump",
    "rotate",
    "freeze_core",
]


@dataclass
class IntegralBundle:
    h: np.ndarray
    eri: np.ndarray
    n_electrons: int
    core_energy: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def n_orbitals(self):
        return self.h.shape[0]

    @property
    def n_spin_orbitals(self):
        return 2 * self.h.shape[0]

    def validate(self, symmetry_tol=1e-8):
        """Check shapes, hermiticity and eightfold permutation symmetry."""
        n = self.h.shape[0]
        if self.h.shape != (n, n):
            raise ValueError(f"one-electron matrix has shape {self.h.shape}")
        if self.eri.shape != (n, n, n, n):
            raise ValueError(
                f"two-electron tensor shape {self.eri.shape} does not match {n} orbitals"
            )
        if not 0 <= self.n_electrons <= 2 * n:
            raise ValueError(f"{self.n_electrons} electrons in {n} orbitals")
        if np.abs(self.h - self.h.T).max() > symmetry_tol:
            raise ValueError("one-electron matrix is not symmetric")
        g = self.eri
        for permuted in (
            g.transpose(1, 0, 2, 3),
            g.transpose(0, 1, 3, 2),
            g.transpose(2, 3, 0, 1),
        ):
            if np.abs(g - permuted).max() > symmetry_tol:
                raise ValueError("two-electron tensor lacks eightfold symmetry")
        return self

    def copy(self):
        return IntegralBundle(
            h=self.h.copy(),
            eri=self.eri.copy(),
            n_electrons=self.n_electrons,
            core_energy=self.core_energy,
            metadata=dict(self.metadata),
        )


def parse_fcidump(path):
    """Read an FCIDUMP file into an :class:`IntegralBundle`.

    Accepts the common namelist header (``&FCI ... &END`` or ``/``) with
    NORB and NELEC required.  Integral lines are ``value i j k l`` with
    1-based indices; ``k = l = 0`` marks one-electron entries, all-zero
    indices the core energy.  Eightfold symmetry is expanded from the
    stored unique entries.
    """
    with open(path) as handle:
        text = handle.read()
    upper = text.upper()
    start = upper.find("&FCI")
    if start < 0:
        raise FcidumpError(f"{path}: missing &FCI header")
    for marker in ("&END", "/"):
        end = upper.find(marker, start + 4)
        if end >= 0:
            break
    else:
        raise FcidumpError(f"{path}: unterminated namelist header")
    header = text[start + 4 : end]
    body = text[end + len(marker) :]

    fields = {}
    for chunk in header.replace("\n", " ").split(","):
        if "=" not in chunk:
            continue
        key, _, value = chunk.partition("=")
        fields[key.strip().upper()] = value.strip()
    try:
        n_orb = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
    except KeyError as exc:
        raise FcidumpError(f"{path}: header lacks {exc.args[0]}") from None
    except ValueError as exc:
        raise FcidumpError(f"{path}: malformed header field ({exc})") from None
    if n_orb <= 0:
        raise FcidumpError(f"{path}: NORB must be positive, got {n_orb}")

    h = np.zeros((n_orb, n_orb))
    eri = np.zeros((n_orb, n_orb, n_orb, n_orb))
    core = 0.0
    header_lines = text[: start + len(header) + 4].count("\n")
    for offset, line in enumerate(body.splitlines()):
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        lineno = header_lines + offset + 1
        if len(parts) != 5:
            raise FcidumpError(f"{path}:{lineno}: expected 'value i j k l', got {line!r}")
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpError(f"{path}:{lineno}: malformed integral line {line!r}") from None
        for index in (i, j, k, l):
            if index < 0 or index > n_orb:
                raise FcidumpError(f"{path}:{lineno}: orbital index {index} out of range")
        if i == j == k == l == 0:
            core = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"{path}:{lineno}: bad one-electron indices")
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpError(f"{path}:{lineno}: bad two-electron indices")
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in (
                (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
            ):
                eri[a, b, c, d] = value

    bundle = IntegralBundle(h=h, eri=eri, n_electrons=n_elec, core_energy=core)
    bundle.metadata["source"] = str(path)
    if "MS2" in fields:
        try:
            bundle.metadata["ms2"] = int(fields["MS2"])
        except ValueError:
            pass
    return bundle.validate()


def write_fcidump(bundle, path, threshold=1e-14):
    """Write a bundle as FCIDUMP, storing only symmetry-unique entries."""
    n = bundle.n_orbitals
    ms2 = int(bundle.metadata.get("ms2", bundle.n_electrons % 2))
    with open(path, "w") as out:
        out.write(f" &FCI NORB={n:3d},NELEC={bundle.n_electrons:3d},MS2={ms2},\n")
        out.write("  ORBSYM=" + "1," * n + "\n")
        out.write("  ISYM=1,\n")
        out.write(" &END\n")
        for p in range(n):
            for q in range(p + 1):
                pq = p * (p + 1) // 2 + q
                for r in range(p + 1):
                    for s in range(r + 1):
                        rs = r * (r + 1) // 2 + s
                        if rs > pq:
                            continue
                        value = bundle.eri[p, q, r, s]
                        if abs(value) > threshold:
                            out.write(
                                f"{value:23.16E} {p + 1:4d} {q + 1:4d} {r + 1:4d} {s + 1:4d}\n"
                            )
        for p in range(n):
            for q in range(p + 1):
                value = bundle.h[p, q]
                if abs(value) > threshold:
                    out.write(f"{value:23.16E} {p + 1:4d} {q + 1:4d} {0:4d} {0:4d}\n")
        out.write(f"{bundle.core_energy:23.16E} {0:4d} {0:4d} {0:4d} {0:4d}\n")


def rotate(bundle, coefficients):
    """Transform a bundle into the orbital basis given by ``coefficients``.

    Columns of ``coefficients`` expand the new orbitals in the current
    ones; the matrix may be rectangular to project onto a subspace.
    """
    c = np.asarray(coefficients)
    if c.shape[0] != bundle.n_orbitals:
        raise ValueError(
            f"coefficient rows {c.shape[0]} do not match {bundle.n_orbitals} orbitals"
        )
    h = c.T @ bundle.h @ c
    eri = np.einsum("pqrs,pa,qb,rc,sd->abcd", bundle.eri, c, c, c, c, optimize=True)
    return IntegralBundle(
        h=h,
        eri=eri,
        n_electrons=bundle.n_electrons,
        core_energy=bundle.core_energy,
        metadata=dict(bundle.metadata),
    )


def freeze_core(bundle, n_frozen):
    """Fold the first ``n_frozen`` (doubly occupied) orbitals into constants.

    The frozen orbitals contribute a closed-shell mean field to the
    remaining ones and a constant energy; the returned bundle spans the
    active orbitals only.
    """
    if n_frozen == 0:
        return bundle.copy()
    n = bundle.n_orbitals
    if not 0 < n_frozen < n:
        raise ValueError(f"cannot freeze {n_frozen} of {n} orbitals")
    if bundle.n_electrons < 2 * n_frozen:
        raise ValueError("not enough electrons to fill the frozen orbitals")
    core = np.arange(n_frozen)
    active = np.arange(n_frozen, n)
    g = bundle.eri

    # frozen-core constant:  2 h_ii + sum_j [2 (ii|jj) - (ij|ji)]
    e_core = 2.0 * np.trace(bundle.h[np.ix_(core, core)])
    g_cc = g[np.ix_(core, core, core, core)]
    e_core += 2.0 * np.einsum("iijj->", g_cc) - np.einsum("ijji->", g_cc)

    # effective one-electron field on the active space
    g_acc = g[np.ix_(active, active, core, core)]
    g_acca = g[np.ix_(active, core, core, active)]
    h_active = (
        bundle.h[np.ix_(active, active)]
        + 2.0 * np.einsum("pqii->pq", g_acc)
        - np.einsum("piiq->pq", g_acca)
    )
    return IntegralBundle(
        h=h_active,
        eri=np.ascontiguousarray(g[np.ix_(active, active, active, active)]),
        n_electrons=bundle.n_electrons - 2 * n_frozen,
        core_energy=bundle.core_energy + float(e_core),
        metadata=dict(bundle.metadata),
    )
