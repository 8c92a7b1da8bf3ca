"""Dense complex tensor kernels: contraction, axis merging, SVD, QR, truncation.

Everything operates on plain numpy arrays in double-precision complex and
returns new arrays; inputs are never mutated. These are the primitives the
MPS engines are built on.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import NumericError, ShapeError

UNBOUNDED = 2**31


class SvdTriple(NamedTuple):
    """Factors of m = u @ diag(s) @ vh; s is real, non-negative, non-increasing."""

    u: np.ndarray
    s: np.ndarray
    vh: np.ndarray


@dataclass(frozen=True)
class TruncationPolicy:
    """Bond truncation rule: keep at most ``max_kept`` singular values and drop
    any whose ratio to the largest is strictly below ``rel_cutoff``.

    ``renormalize`` rescales the kept values to unit squared sum (the physical
    convention); set it to False to keep the raw decayed norm for debugging.
    """

    max_kept: int
    rel_cutoff: float = 0.0
    renormalize: bool = True

    def __post_init__(self):
        if self.max_kept < 1:
            raise ValueError(f"max_kept must be >= 1, got {self.max_kept}")
        if not 0.0 <= self.rel_cutoff < 1.0:
            raise ValueError(f"rel_cutoff must be in [0, 1), got {self.rel_cutoff}")

    @classmethod
    def exact(cls) -> "TruncationPolicy":
        """Policy that never truncates (up to the backend's full rank)."""
        return cls(max_kept=UNBOUNDED, rel_cutoff=0.0)

    def with_min_cutoff(self, floor: float) -> "TruncationPolicy":
        """Same policy with the relative cutoff raised to at least ``floor``."""
        if self.rel_cutoff >= floor:
            return self
        return replace(self, rel_cutoff=floor)


def contract(a: np.ndarray, b: np.ndarray, axis_pairs) -> np.ndarray:
    """Contract ``a`` with ``b`` over the given (axis_of_a, axis_of_b) pairs.

    The result carries the unpaired axes of ``a`` followed by those of ``b``.
    An empty pair list yields the outer product.
    """
    if axis_pairs:
        ax_a, ax_b = zip(*axis_pairs)
    else:
        ax_a, ax_b = (), ()
    for pa, pb in zip(ax_a, ax_b):
        if a.shape[pa] != b.shape[pb]:
            raise ShapeError(
                f"cannot contract axis {pa} (extent {a.shape[pa]}) with "
                f"axis {pb} (extent {b.shape[pb]})"
            )
    return np.tensordot(a, b, axes=(list(ax_a), list(ax_b)))


def merge_axes(t: np.ndarray, groups) -> np.ndarray:
    """Reorder and fuse axes: each group of axes becomes one axis whose extent
    is the product of the group's extents. ``groups`` must be an ordered
    partition of all axes; the data map is bijective, so merging is exactly
    reversible by the inverse reshape/transpose.
    """
    order = [ax for g in groups for ax in g]
    if any(len(g) == 0 for g in groups) or sorted(order) != list(range(t.ndim)):
        raise ShapeError(f"groups {groups!r} are not an ordered partition of {t.ndim} axes")
    shape = [int(np.prod([t.shape[ax] for ax in g])) for g in groups]
    return t.transpose(order).reshape(shape)


def svd(m: np.ndarray) -> SvdTriple:
    """Thin SVD of a matrix. Falls back to the slower but sturdier gesvd
    driver if gesdd fails to converge; raises NumericError if both fail.
    """
    if m.ndim != 2:
        raise ShapeError(f"svd expects a matrix, got rank {m.ndim}")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        try:
            u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        except Exception as exc:
            raise NumericError(f"SVD did not converge for shape {m.shape}") from exc
    return SvdTriple(u, s, vh)


def qr_left(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization m = Q R with Q's columns orthonormal."""
    if m.ndim != 2:
        raise ShapeError(f"qr_left expects a matrix, got rank {m.ndim}")
    q, r = np.linalg.qr(m, mode="reduced")
    return q, r


def qr_right(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """RQ factorization m = R Q with Q's rows orthonormal (QR of the transpose)."""
    if m.ndim != 2:
        raise ShapeError(f"qr_right expects a matrix, got rank {m.ndim}")
    q, r = np.linalg.qr(m.T, mode="reduced")
    return r.T, q.T


def truncate(t: SvdTriple, policy: TruncationPolicy) -> tuple[SvdTriple, float]:
    """Apply a truncation policy to an SVD, returning the reduced triple and
    the discarded weight (sum of squared dropped singular values).

    At least one value is always kept. A value is dropped by the relative
    cutoff iff its ratio to the largest value is strictly below the cutoff.
    Kept values are renormalized to unit squared sum unless the policy says
    otherwise; the discarded weight always refers to the pre-renormalization
    values.
    """
    s = t.s
    largest = s[0] if s.size else 0.0
    if largest > 0.0 and policy.rel_cutoff > 0.0:
        above = int(np.count_nonzero(s >= policy.rel_cutoff * largest))
    else:
        above = s.size
    k = max(1, min(s.size, policy.max_kept, above))
    discarded = float(np.sum(s[k:] ** 2))
    kept = s[:k].copy()
    if policy.renormalize:
        norm = np.sqrt(np.sum(kept**2))
        if norm > 0.0:
            kept /= norm
    return SvdTriple(t.u[:, :k], kept, t.vh[:k, :]), discarded
