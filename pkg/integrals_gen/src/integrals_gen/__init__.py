"""Integral bundle generator for small-molecule quantum chemistry.

Produces FCIDUMP files plus JSON metadata (geometry, orbital counts,
mean-field and full-CI reference energies) in either the canonical
molecular-orbital basis or a symmetrically orthogonalized atomic basis.
The electronic-structure backend (Gaussian integrals, RHF, determinant CI)
is self-contained; only STO-3G s and p shells are supported.
"""

from .bundle import gen_bundle
from .geometry import parse_geometry
from . import molecules

__all__ = ["gen_bundle", "parse_geometry", "molecules"]
__version__ = "0.1.0"
