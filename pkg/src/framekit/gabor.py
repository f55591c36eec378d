"""Discrete Gabor systems on the cyclic group Z_L.

The continuous lattice (a, b) becomes a divisor pair of L; time shifts are
cyclic shifts by a, modulations multiply by exp(2*pi*i*b*j/L). The family
order is deterministic: shift index n outer, modulation index m inner.
Correlation-based (Walnut-style) frame-bound estimates, the envelope
inequality, Wiener-norm window perturbation and the structured dual-window
construction all operate directly on windows in C^L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    InputError,
    TolerancePolicy,
    adjoint,
    as_cmatrix,
    operator_norm,
)
from .frames import Frame, analysis_matrix, frame_bounds, frame_operator, is_frame, \
    synthesis_matrix
from .approxdual import ApproxDualReport
from .perturbation import BoundAudit, make_audit


class LatticeError(ValueError):
    """Time or frequency step does not divide the signal length."""


class StructureViolation(ValueError):
    """Operator fails to commute with the lattice shift/modulation generators."""


@dataclass(frozen=True)
class GaborSystem:
    L: int
    a: int
    b: int
    window: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.L < 1 or self.a < 1 or self.b < 1:
            raise LatticeError("L, a, b must be positive")
        if self.L % self.a != 0 or self.L % self.b != 0:
            raise LatticeError(f"a={self.a} and b={self.b} must divide L={self.L}")
        g = np.asarray(self.window, dtype=np.complex128).reshape(-1)
        if g.shape[0] != self.L:
            raise InputError(f"window has length {g.shape[0]}, expected {self.L}")
        if not np.all(np.isfinite(g.real)) or not np.all(np.isfinite(g.imag)):
            raise InputError("window has non-finite entries")
        g = g.copy()
        g.flags.writeable = False
        object.__setattr__(self, "window", g)

    @property
    def n_shifts(self) -> int:
        return self.L // self.a

    @property
    def n_modulations(self) -> int:
        return self.L // self.b

    @property
    def n_vectors(self) -> int:
        return self.n_shifts * self.n_modulations

    @property
    def redundancy(self) -> float:
        return self.L / (self.a * self.b)

    def with_window(self, g) -> "GaborSystem":
        return GaborSystem(L=self.L, a=self.a, b=self.b, window=g)


def build_gabor_frame(sys: GaborSystem) -> Frame:
    """Frame of all time-frequency shifts of the window, n outer / m inner."""
    L, a, b = sys.L, sys.a, sys.b
    j = np.arange(L)
    phases = np.exp(2j * np.pi * b * np.outer(np.arange(sys.n_modulations), j) / L)
    cols = np.empty((L, sys.n_vectors), dtype=np.complex128)
    idx = 0
    for n in range(sys.n_shifts):
        shifted = np.roll(sys.window, n * a)
        for m in range(sys.n_modulations):
            cols[:, idx] = phases[m] * shifted
            idx += 1
    return Frame(dim=L, matrix=cols)


def correlations(sys: GaborSystem, other_window=None) -> np.ndarray:
    """Cross-correlation family G_k[j], k = 0..b-1, over the dual lattice.

    G_k[j] = sum_n w1[(j - n a) mod L] * conj(w2[(j - n a - k L/b) mod L]),
    with w1 = window and w2 = other_window (default: the window itself).
    """
    L, a, b = sys.L, sys.a, sys.b
    g1 = sys.window
    g2 = g1 if other_window is None else np.asarray(other_window, dtype=np.complex128)
    step = L // b
    j = np.arange(L)
    n = np.arange(sys.n_shifts)
    base = (j[None, :] - a * n[:, None]) % L  # n_shifts x L
    out = np.empty((b, L), dtype=np.complex128)
    for k in range(b):
        out[k] = np.sum(g1[base] * np.conj(g2[(base - k * step) % L]), axis=0)
    return out


@dataclass(frozen=True)
class WalnutReport:
    correlations: np.ndarray = field(repr=False)
    lower_est: float
    upper_est: float


def walnut_report(sys: GaborSystem) -> WalnutReport:
    """Correlation-sum frame-bound estimates.

    The min-form (diagonal term minus off-diagonal magnitudes) is the lower
    estimate, clamped at zero; the max-form sum of magnitudes is the upper
    estimate. Both sandwich the optimal eigen-bounds of the generated frame.
    """
    G = correlations(sys)
    absG = np.abs(G)
    scale = sys.L / sys.b
    upper = scale * float(np.max(np.sum(absG, axis=0)))
    diag = G[0].real
    off = np.sum(absG[1:], axis=0) if sys.b > 1 else np.zeros(sys.L)
    lower = scale * float(np.min(diag - off))
    return WalnutReport(correlations=G, lower_est=max(lower, 0.0), upper_est=upper)


def envelope_audit(sys: GaborSystem) -> BoundAudit:
    """max_j of the window energy envelope <= (b/L) * upper optimal bound."""
    G0 = correlations(sys)[0].real
    M_opt = frame_bounds(build_gabor_frame(sys)).upper_opt
    return make_audit("envelope", float(np.max(G0)), (sys.b / sys.L) * M_opt)


def wiener_norm(g, L: int, a: int) -> float:
    """Sum over length-a blocks of the per-block max magnitude."""
    if L % a != 0:
        raise LatticeError(f"a={a} must divide L={L}")
    v = np.asarray(g, dtype=np.complex128).reshape(-1)
    if v.shape[0] != L:
        raise InputError(f"window has length {v.shape[0]}, expected {L}")
    return float(np.sum(np.max(np.abs(v).reshape(L // a, a), axis=1)))


def correlation_r(sys1: GaborSystem, g2) -> float:
    """Perturbation measure r: the upper Walnut estimate of the difference window.

    sqrt(r) dominates the synthesis-operator distance of the two generated
    families, so it can stand in for mu in the general perturbation audits.
    """
    g2 = np.asarray(g2, dtype=np.complex128).reshape(-1)
    if g2.shape[0] != sys1.L:
        raise InputError(f"g2 has length {g2.shape[0]}, expected {sys1.L}")
    return walnut_report(sys1.with_window(sys1.window - g2)).upper_est


def _shift_matrix(L: int, a: int) -> np.ndarray:
    T = np.zeros((L, L))
    T[(np.arange(L) + a) % L, np.arange(L)] = 1.0
    return T


def _modulation_matrix(L: int, b: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * b * np.arange(L) / L))


def commutation_residual(sys: GaborSystem, A) -> float:
    """Max operator-norm residual against the shift-by-a and modulate-by-b generators."""
    A = as_cmatrix(A)
    T = _shift_matrix(sys.L, sys.a)
    E = _modulation_matrix(sys.L, sys.b)
    return max(operator_norm(A @ T - T @ A), operator_norm(A @ E - E @ A))


def commuting_operator(sys: GaborSystem, spec) -> np.ndarray:
    """Build an admissible lattice-commuting operator.

    spec is either a scalar c (A = c*I) or a coefficient sequence
    (c0, c1, ...) for the polynomial c0*I + c1*S + c2*S^2 + ... in the frame
    operator. The resulting A must satisfy ||I - A|| < 1.
    """
    L = sys.L
    if np.isscalar(spec):
        A = complex(spec) * np.eye(L, dtype=np.complex128)
    else:
        coeffs = list(spec)
        S = frame_operator(build_gabor_frame(sys))
        A = np.zeros((L, L), dtype=np.complex128)
        power = np.eye(L, dtype=np.complex128)
        for c in coeffs:
            A += complex(c) * power
            power = power @ S
    if operator_norm(np.eye(L) - A) >= 1.0:
        from .approxdual import ContractionViolation
        raise ContractionViolation("spec yields ||I - A|| >= 1")
    return A


def gabor_approx_dual_window(sys: GaborSystem, A, h,
                             tol: TolerancePolicy = DEFAULT_TOL
                             ) -> tuple[np.ndarray, ApproxDualReport]:
    """Structured approximately dual window for a lattice-commuting A.

    g_ad = A* S^{-1} g + h - sum_{m,n} <S^{-1} g, v_{m,n}> (time-frequency
    shifts of h), where v_{m,n} runs over the system's own family. The Gabor
    family of the returned window is an approximately dual frame of the
    system with reconstruction operator A.
    """
    from .approxdual import ApproxDualParams, build_approx_dual, bessel_to_theta
    from .perturbation import PreconditionFailure

    A = as_cmatrix(A)
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    if h.shape[0] != sys.L:
        raise InputError(f"h has length {h.shape[0]}, expected {sys.L}")
    F = build_gabor_frame(sys)
    if not is_frame(F, tol):
        raise PreconditionFailure("the system does not generate a frame")
    if commutation_residual(sys, A) > 1e-9 * max(operator_norm(A), 1.0):
        raise StructureViolation("A does not commute with the lattice generators")

    S = frame_operator(F)
    s_inv_g = np.linalg.solve(S, sys.window)
    coeffs = analysis_matrix(F) @ s_inv_g  # <S^{-1} g, v_mn> conjugated per analysis row
    H = synthesis_matrix(build_gabor_frame(sys.with_window(h)))
    window = adjoint(A) @ s_inv_g + h - H @ coeffs

    dual_frame = build_gabor_frame(sys.with_window(window))
    reconstruction = synthesis_matrix(F) @ adjoint(synthesis_matrix(dual_frame))
    rate = operator_norm(np.eye(sys.L) - reconstruction)
    report = ApproxDualReport(
        dual=dual_frame,
        reconstruction=reconstruction,
        rate=rate,
        is_alternate_dual=rate <= tol.identity_residual_rel,
    )
    return window, report


def gabor_perturbation_audit(sys1: GaborSystem, g2, A1, A2,
                             tol: TolerancePolicy = DEFAULT_TOL,
                             trials: int = 50, seed: int = 0) -> list[BoundAudit]:
    """Window-perturbation audits for the generated frames.

    Emits: (i) the lower-bound guarantee for the perturbed system, (ii) the
    canonical-dual window deviation envelope, (iii) the family-level
    best-approximation lambda bound with sqrt(r) in the mu role, and the
    Wiener-proxy domination diagnostics (both candidate discretizations of
    the linear-in-window proxy; reported, never silently corrected).
    """
    from .approxdual import ApproxDualParams
    from .perturbation import best_approx_dual

    g2 = np.asarray(g2, dtype=np.complex128).reshape(-1)
    A1 = as_cmatrix(A1)
    A2 = as_cmatrix(A2)
    for name, A in (("A1", A1), ("A2", A2)):
        if commutation_residual(sys1, A) > 1e-9 * max(operator_norm(A), 1.0):
            raise StructureViolation(f"{name} does not commute with the lattice generators")

    sys2 = sys1.with_window(g2)
    F1 = build_gabor_frame(sys1)
    F2 = build_gabor_frame(sys2)
    m1 = frame_bounds(F1).lower_opt
    r = correlation_r(sys1, g2)
    sr = math.sqrt(r)

    audits: list[BoundAudit] = []

    ok = r < m1
    lower_pred = (math.sqrt(m1) - sr) ** 2 if ok else float("nan")
    audits.append(make_audit("gabor1.lower", lower_pred,
                             frame_bounds(F2).lower_opt if ok else float("nan"), ok))

    # canonical-dual window deviation envelope, mu = sqrt(r)
    if ok:
        S1 = frame_operator(F1)
        S2 = frame_operator(F2)
        w1 = adjoint(A1) @ np.linalg.solve(S1, sys1.window)
        w2 = adjoint(A2) @ np.linalg.solve(S2, g2)
        dw_sys = sys1.with_window(w1 - w2)
        env_lhs = float(np.max(correlations(dw_sys)[0].real))
        sm1 = math.sqrt(m1)
        cad_rhs = (2 * sr * operator_norm(A1) / (sm1 * (sm1 - sr))
                   + operator_norm(A1 - A2) / (sm1 - sr))
        audits.append(make_audit("gabor1.envelope", env_lhs,
                                 (sys1.b / sys1.L) * cad_rhs**2))
    else:
        audits.append(make_audit("gabor1.envelope", float("nan"), float("nan"), False))

    # family-level best approximation with sqrt(r) >= mu in the lambda bound
    mu = operator_norm(synthesis_matrix(F1) - synthesis_matrix(F2))
    if ok and mu < math.sqrt(m1):
        P1 = ApproxDualParams(
            A=A1, Theta=np.zeros((F1.n_vectors, sys1.L), dtype=np.complex128))
        result = best_approx_dual(F1, F2, P1, A2, trials=trials, seed=seed, tol=tol)
        sm1 = math.sqrt(m1)
        lam_r = (sr / (sm1 - sr)) * (operator_norm(A1) / sm1) \
            + operator_norm(A1 - A2) / (sm1 - sr)
        audits.append(make_audit("gabor1.best-app", result.distance, lam_r))
        audits.append(result.optimality)
    else:
        audits.append(make_audit("gabor1.best-app", float("nan"), float("nan"), False))

    # Wiener-space proxies: both candidate discretizations of the (2/b) factor
    dw = wiener_norm(sys1.window - g2, sys1.L, sys1.a)
    scale = 2 * sys1.L / sys1.b
    audits.append(make_audit("wiener.r_le_linear_proxy", r, scale * dw, diagnostic=True))
    audits.append(make_audit("wiener.r_le_quadratic_proxy", r, scale * dw**2,
                             diagnostic=True))
    for proxy_name, proxy in (("linear", scale * dw), ("quadratic", scale * dw**2)):
        ok_w = proxy < m1
        lower_pred = (math.sqrt(m1) - math.sqrt(proxy)) ** 2 if ok_w else float("nan")
        audits.append(make_audit(f"wiener.{proxy_name}.lower", lower_pred,
                                 frame_bounds(F2).lower_opt if ok_w else float("nan"),
                                 ok_w, diagnostic=True))
    return audits
