"""Deterministic instance generation for the randomized audits.

All randomness flows from a single 64-bit seed through named streams
(stream id = operation name), so adding a new audit never shifts the
instances drawn by existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np

from .linalg import DEFAULT_TOL, TolerancePolicy, kernel_basis, operator_norm
from .frames import Frame, frame_bounds, is_frame, synthesis_matrix


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Independent generator for the named stream under the master seed."""
    tag = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), tag]))


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_frame(rng: np.random.Generator, dim: int, n_vectors: int) -> Frame:
    """Random Gaussian frame; resampled in the (measure-zero) singular case."""
    for _ in range(16):
        F = Frame(dim=dim, matrix=random_complex(rng, dim, n_vectors))
        if is_frame(F):
            return F
    raise RuntimeError("failed to draw a full-rank random frame")


def random_admissible_A(rng: np.random.Generator, dim: int,
                        rho_max: float = 0.95) -> np.ndarray:
    """A = I + rho * R/||R|| with rho uniform in [0, rho_max), so ||I - A|| < 1."""
    R = random_complex(rng, dim, dim)
    rho = rng.uniform(0.0, rho_max)
    return np.eye(dim, dtype=np.complex128) + rho * R / operator_norm(R)


def random_kernel_theta(rng: np.random.Generator, F: Frame,
                        norm_scale: float = 1.0,
                        tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Random N x d Theta with columns in ker(T_F), of controlled norm."""
    B = kernel_basis(synthesis_matrix(F), tol)
    N, k = F.n_vectors, B.shape[1]
    if k == 0:
        return np.zeros((N, F.dim), dtype=np.complex128)
    C = random_complex(rng, k, F.dim)
    C *= rng.uniform(0.1, norm_scale) / max(operator_norm(C), 1e-300)
    return B @ C


def perturbed_frame(rng: np.random.Generator, F: Frame, mu: float) -> Frame:
    """A frame at synthesis-operator distance exactly mu from F."""
    E = random_complex(rng, F.dim, F.n_vectors)
    E *= mu / operator_norm(E)
    return Frame(dim=F.dim, matrix=synthesis_matrix(F) + E)


def small_perturbation(rng: np.random.Generator, F: Frame,
                       fraction: float = 0.4) -> Frame:
    """Perturbation with mu a fraction of sqrt(m_opt), keeping G a frame."""
    m = frame_bounds(F).lower_opt
    mu = rng.uniform(0.01, fraction) * np.sqrt(m)
    return perturbed_frame(rng, F, mu)
