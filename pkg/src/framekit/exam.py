"""Geometric-block frame pair with unit synthesis distance but small q_0.

Block n (1-based, n = 1..K) holds 4^n copies of e_n / 2^n; the perturbed
family scales the first copy of each block by t_n (t_1 = 3, t_n = 2). The
original family is a Parseval frame, the perturbed one has bounds
(1 + 3/4^K, 3), and as K grows q -> 13/12 > 1 while q_0 -> 7/12 < 1:
the pair defeats the plain quadratic and synthesis-distance regimes but
stays inside the canonically weighted one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import InputError
from .frames import Frame

MAX_BLOCKS = 10  # N grows as 4^(K+1)/3; K = 10 is the accepted desk ceiling

Q_LIMIT = 13.0 / 12.0
Q0_LIMIT = 7.0 / 12.0
MU_EXACT = 1.0


@dataclass(frozen=True)
class ExamPair:
    original: Frame
    perturbed: Frame
    blocks: int
    q_limit: float
    q0_limit: float
    mu: float
    q_truncation_tail: float
    q0_truncation_tail: float


def generate_exam(blocks: int) -> ExamPair:
    """Build the truncated pair with `blocks` geometric blocks in C^blocks."""
    K = blocks
    if not (1 <= K <= MAX_BLOCKS):
        raise InputError(f"blocks must be in 1..{MAX_BLOCKS}, got {K}")
    sizes = [4**n for n in range(1, K + 1)]
    N = sum(sizes)
    phi = np.zeros((K, N))
    psi = np.zeros((K, N))
    col = 0
    for n in range(1, K + 1):
        alpha = 2.0**n
        t = 3.0 if n == 1 else 2.0
        k_n = 4**n
        phi[n - 1, col:col + k_n] = 1.0 / alpha
        psi[n - 1, col:col + k_n] = 1.0 / alpha
        psi[n - 1, col] = t / alpha
        col += k_n
    # tails of the defining series beyond block K (both are sums of 4^-n)
    tail = (4.0 ** -K) / 3.0
    return ExamPair(
        original=Frame(dim=K, matrix=phi),
        perturbed=Frame(dim=K, matrix=psi),
        blocks=K,
        q_limit=Q_LIMIT,
        q0_limit=Q0_LIMIT,
        mu=MU_EXACT,
        q_truncation_tail=tail,
        q0_truncation_tail=tail,
    )
