"""Frames as finite vector families in C^d.

A Frame stores its synthesis matrix (d x N, column n = vector n); the
analysis and frame operators are derived on demand. All operations are
pure; Frame arrays are frozen after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    InputError,
    TolerancePolicy,
    adjoint,
    as_cmatrix,
    numerical_rank,
    operator_norm,
    range_basis,
)


class NotAFrameError(ValueError):
    """The family does not span C^d (lower optimal bound is zero)."""


@dataclass(frozen=True)
class FrameBounds:
    lower_opt: float
    upper_opt: float
    tight: bool


@dataclass(frozen=True)
class Frame:
    """An ordered family of N vectors in C^dim, held as a d x N matrix."""

    dim: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = as_cmatrix(self.matrix)
        if M.shape[0] != self.dim:
            raise InputError(f"matrix has {M.shape[0]} rows, expected dim={self.dim}")
        if self.dim < 1 or M.shape[1] < 1:
            raise InputError("frame needs positive dimension and at least one vector")
        M = M.copy()
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_vectors(cls, vectors) -> "Frame":
        V = np.asarray(vectors, dtype=np.complex128)
        if V.ndim != 2:
            raise InputError("vectors must be a list of equal-length vectors")
        return cls(dim=V.shape[1], matrix=V.T)

    @property
    def n_vectors(self) -> int:
        return self.matrix.shape[1]

    @property
    def vectors(self) -> np.ndarray:
        """Vectors as rows (N x d)."""
        return self.matrix.T

    def vector(self, n: int) -> np.ndarray:
        return self.matrix[:, n]


def synthesis_matrix(F: Frame) -> np.ndarray:
    """d x N synthesis operator: coefficients -> sum of weighted vectors."""
    return F.matrix


def analysis_matrix(F: Frame) -> np.ndarray:
    """N x d analysis operator: f -> (<f, phi_n>)_n. Adjoint of synthesis."""
    return adjoint(F.matrix)


def frame_operator(F: Frame) -> np.ndarray:
    """S = T T*, Hermitian positive semidefinite d x d."""
    T = F.matrix
    return T @ adjoint(T)


def frame_bounds(F: Frame) -> FrameBounds:
    """Optimal bounds = extreme eigenvalues of the frame operator."""
    w = np.linalg.eigvalsh((frame_operator(F) + adjoint(frame_operator(F))) / 2)
    lower = float(max(w[0], 0.0))
    upper = float(max(w[-1], 0.0))
    tight = abs(upper - lower) <= 1e-10 * upper if upper > 0 else True
    return FrameBounds(lower_opt=lower, upper_opt=upper, tight=tight)


def is_frame(F: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    b = frame_bounds(F)
    return b.lower_opt > tol.rank_cutoff_rel * b.upper_opt


def canonical_dual(F: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> Frame:
    """The family (S^{-1} phi_n)_n."""
    if not is_frame(F, tol):
        raise NotAFrameError("canonical dual requires a frame (rank-deficient frame operator)")
    dual = np.linalg.solve(frame_operator(F), F.matrix)
    return Frame(dim=F.dim, matrix=dual)


def is_dual_pair(F: Frame, G: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """True iff T_F U_G is the identity within tolerance."""
    _check_same_shape(F, G)
    R = F.matrix @ adjoint(G.matrix)
    return operator_norm(R - np.eye(F.dim)) <= tol.identity_residual_rel


def excess(F: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    """N minus the numerical rank of the synthesis operator."""
    return F.n_vectors - numerical_rank(F.matrix, tol)


def frame_norm_distance(F: Frame, G: Frame) -> float:
    """Operator norm of the synthesis difference (the frame-set metric)."""
    _check_same_shape(F, G)
    return operator_norm(F.matrix - G.matrix)


def analysis_range_basis(F: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (N x rank) of ran(U_F) inside coefficient space."""
    return range_basis(analysis_matrix(F), tol)


def project_onto_synthesis_kernel(F: Frame, M: np.ndarray,
                                  tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Apply P_{ker T_F} to the columns of M without forming an N x N projector.

    Uses ker(T_F) = ran(U_F)^perp, so P_ker = I - Q Q* with Q a thin
    orthonormal basis of the analysis range.
    """
    Q = analysis_range_basis(F, tol)
    return M - Q @ (adjoint(Q) @ M)


def _check_same_shape(F: Frame, G: Frame) -> None:
    if F.dim != G.dim or F.n_vectors != G.n_vectors:
        raise InputError(
            f"frame shape mismatch: ({F.dim}, {F.n_vectors}) vs ({G.dim}, {G.n_vectors})"
        )
