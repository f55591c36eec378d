"""Dense complex linear-algebra substrate shared by all modules.

Everything works on plain complex128 ndarrays. A single TolerancePolicy
carries the numerical-rank cutoff and residual tolerances used when a
mathematical statement ("the kernel", "is Hermitian", "is the identity")
has to be decided in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InputError(ValueError):
    """Malformed or non-finite input."""


class SymmetryError(ValueError):
    """Matrix fails a required Hermitian-symmetry check."""


@dataclass(frozen=True)
class TolerancePolicy:
    rank_cutoff_rel: float = 1e-12
    identity_residual_rel: float = 1e-9
    strict_contraction_margin: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.rank_cutoff_rel < 1.0):
            raise InputError("rank_cutoff_rel must lie in (0, 1)")
        if not (0.0 < self.identity_residual_rel < 1.0):
            raise InputError("identity_residual_rel must lie in (0, 1)")
        if not (0.0 <= self.strict_contraction_margin < 1.0):
            raise InputError("strict_contraction_margin must lie in [0, 1)")


DEFAULT_TOL = TolerancePolicy()


def as_cmatrix(M) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim != 2:
        raise InputError(f"expected a 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or not np.all(np.isfinite(A.imag)):
        raise InputError("matrix has non-finite entries")
    return A


def adjoint(M) -> np.ndarray:
    return np.conj(np.asarray(M)).T


def operator_norm(M) -> float:
    """Largest singular value of M."""
    A = as_cmatrix(M)
    if A.size == 0:
        return 0.0
    return float(np.linalg.svd(A, compute_uv=False)[0])


def hermitian_eig_extremes(M, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[float, float]:
    """Extreme eigenvalues of the Hermitian symmetrization (M + M*)/2.

    Rejects matrices whose anti-Hermitian part exceeds the identity-residual
    tolerance; symmetrization only mops up accumulation error.
    """
    A = as_cmatrix(M)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    scale = operator_norm(A)
    if scale > 0 and operator_norm(A - adjoint(A)) > 2 * tol.identity_residual_rel * scale:
        raise SymmetryError("matrix is not Hermitian within tolerance")
    H = (A + adjoint(A)) / 2
    w = np.linalg.eigvalsh(H)
    return float(w[0]), float(w[-1])


def kernel_basis(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ker(M), as columns. Empty (cols, 0) if trivial."""
    A = as_cmatrix(M)
    rows, cols = A.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if rows == 0:
        return np.eye(cols, dtype=np.complex128)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    cutoff = tol.rank_cutoff_rel * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return adjoint(Vh)[:, rank:]


def range_basis(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of M, as columns."""
    A = as_cmatrix(M)
    if A.shape[1] == 0 or A.shape[0] == 0:
        return np.zeros((A.shape[0], 0), dtype=np.complex128)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    cutoff = tol.rank_cutoff_rel * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return U[:, :rank]


def numerical_rank(M, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    A = as_cmatrix(M)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol.rank_cutoff_rel * s[0]))


def orth_projector(spanning, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the column span of `spanning`."""
    A = as_cmatrix(spanning)
    Q = range_basis(A, tol)
    if Q.shape[1] == 0:
        return np.zeros((A.shape[0], A.shape[0]), dtype=np.complex128)
    return Q @ adjoint(Q)


def pseudo_inverse(M, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with the shared rank cutoff."""
    A = as_cmatrix(M)
    if A.size == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=np.complex128)
    return np.linalg.pinv(A, rcond=tol.rank_cutoff_rel)
