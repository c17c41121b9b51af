"""Dense tensor primitives used by the matrix-product-state engine.

A tensor here is a plain C-contiguous numpy array of complex128; axes are
identified by position.  Nothing in this module knows about physical sites
or bonds, it only provides the three operations the network code is built
from: pairwise contraction, axis permutation, and truncated singular value
decomposition.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack as _lapack

from .errors import NumericalError

__all__ = ["SvdResult", "contract", "permute", "svd_truncate"]

# Singular values at or below this are treated as exact zeros and always
# discarded, independent of the caller's rank cap and relative cutoff.
ZERO_WEIGHT = 1e-14


def contract(a, axes_a, b, axes_b):
    """Contract tensor ``a`` with tensor ``b`` over the given axis lists.

    The result carries the surviving axes of ``a`` (in order) followed by
    the surviving axes of ``b``, matching ``numpy.tensordot``.  Empty axis
    lists give the outer product.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    axes_a = list(axes_a)
    axes_b = list(axes_b)
    if len(axes_a) != len(axes_b):
        raise ValueError(
            f"contraction needs matching axis counts, got {len(axes_a)} and {len(axes_b)}"
        )
    for ax_a, ax_b in zip(axes_a, axes_b):
        if a.shape[ax_a] != b.shape[ax_b]:
            raise ValueError(
                f"axis {ax_a} of left tensor (dim {a.shape[ax_a]}) does not match "
                f"axis {ax_b} of right tensor (dim {b.shape[ax_b]})"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def permute(a, order):
    """Reorder the axes of ``a``; ``order`` must be a permutation of them."""
    a = np.asarray(a)
    if sorted(order) != list(range(a.ndim)):
        raise ValueError(f"{tuple(order)} is not a permutation of {a.ndim} axes")
    return np.transpose(a, order)


@dataclass
class SvdResult:
    """Truncated SVD ``matrix ~= left @ diag(singular_values) @ right``.

    ``left`` has orthonormal columns and ``right`` orthonormal rows.  The
    singular values are positive and non-increasing.  ``truncation_error``
    is the 2-norm of the discarded singular values, zero when nothing was
    dropped.
    """

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray
    truncation_error: float


# LAPACK workspace sizes, keyed by driver and matrix shape.  The network
# code calls the SVD once per gate on small matrices, so skipping the
# per-call workspace query and the scipy wrapper is a large constant win.
_LWORK = {}


def _svd_with_fallback(matrix):
    # Divide-and-conquer first; it is the fast path but its iteration can
    # fail on ill-conditioned inputs, where the QR-based driver still works.
    if matrix.dtype == np.float64:
        gesdd, gesdd_lwork, gesvd = _lapack.dgesdd, _lapack.dgesdd_lwork, _lapack.dgesvd
    else:
        if matrix.dtype != np.complex128:
            matrix = matrix.astype(np.complex128)
        gesdd, gesdd_lwork, gesvd = _lapack.zgesdd, _lapack.zgesdd_lwork, _lapack.zgesvd

    key = (gesdd, matrix.shape)
    lwork = _LWORK.get(key)
    if lwork is None:
        work, info = gesdd_lwork(matrix.shape[0], matrix.shape[1], compute_uv=1, full_matrices=0)
        lwork = _LWORK[key] = int(work.real)
    u, s, vt, info = gesdd(matrix, compute_uv=1, full_matrices=0, lwork=lwork)
    if info == 0:
        return u, s, vt
    if info < 0:
        raise NumericalError(f"invalid argument {-info} passed to the SVD driver")

    u, s, vt, info = gesvd(matrix, compute_uv=1, full_matrices=0)
    if info != 0:
        raise NumericalError(
            f"SVD failed to converge for a {matrix.shape[0]}x{matrix.shape[1]} matrix"
        )
    return u, s, vt


def svd_truncate(matrix, max_rank=None, cutoff=0.0):
    """Singular value decomposition truncated by rank cap and relative cutoff.

    Values below ``cutoff`` times the largest singular value are dropped,
    then the rank is capped at ``max_rank`` (``None`` means unbounded).  At
    least one singular value is always kept.  Exact numerical zeros are
    discarded regardless of the cap.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={matrix.ndim}")
    u, s, vh = _svd_with_fallback(matrix)

    keep = s.shape[0]
    if s[0] > 0.0:
        keep = int(np.count_nonzero(s > max(cutoff * s[0], ZERO_WEIGHT)))
    keep = max(keep, 1)
    if max_rank is not None:
        keep = min(keep, int(max_rank))

    error = float(np.sqrt(np.sum(s[keep:] ** 2)))
    return SvdResult(
        left=np.ascontiguousarray(u[:, :keep]),
        singular_values=s[:keep].copy(),
        right=np.ascontiguousarray(vh[:keep]),
        truncation_error=error,
    )
