"""Perturbation measures, subspace gaps, and the deviation-bound audits.

Every displayed inequality becomes a BoundAudit with the computed left and
right sides; a failed precondition is a distinct "not applicable" verdict,
never conflated with a violation. Gap computations use thin orthonormal
bases and cross-Gram singular values, so coefficient spaces of large N stay
tractable.
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
    kernel_basis,
    operator_norm,
    pseudo_inverse,
    range_basis,
)
from .frames import (
    Frame,
    analysis_matrix,
    analysis_range_basis,
    canonical_dual,
    frame_bounds,
    frame_norm_distance,
    is_dual_pair,
    project_onto_synthesis_kernel,
    synthesis_matrix,
    _check_same_shape,
)
from .approxdual import (
    ApproxDualParams,
    ApproxDualReport,
    build_approx_dual,
    canonical_approx_dual,
    dual_synthesis,
    validate_params,
)


class PreconditionFailure(ValueError):
    """A hypothesis required by this operation does not hold."""


class GapHypothesisViolation(ValueError):
    """The restricted kernel-to-kernel projection is numerically singular."""


AUDIT_TOL = 1e-9


@dataclass(frozen=True)
class BoundAudit:
    name: str
    lhs: float
    rhs: float
    preconditions_met: bool
    holds: bool
    slack: float
    diagnostic: bool = False  # open-question report, excluded from violation counts

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "preconditions_met": self.preconditions_met,
            "holds": self.holds,
            "slack": self.slack,
        }

    @property
    def violated(self) -> bool:
        return self.preconditions_met and not self.holds and not self.diagnostic


def make_audit(name: str, lhs: float, rhs: float,
               preconditions_met: bool = True, diagnostic: bool = False) -> BoundAudit:
    holds = bool(preconditions_met and lhs <= rhs + AUDIT_TOL * max(1.0, abs(rhs)))
    return BoundAudit(name=name, lhs=float(lhs), rhs=float(rhs),
                      preconditions_met=bool(preconditions_met), holds=holds,
                      slack=float(rhs - lhs), diagnostic=diagnostic)


# ---------------------------------------------------------------------------
# closeness measures


@dataclass(frozen=True)
class ClosenessReport:
    q: float
    q_weighted: float
    q0: float
    mu: float
    d_quad_flag: bool
    c_quad_flag: bool


def closeness(F: Frame, G: Frame, dual_for_weight="canonical",
              tol: TolerancePolicy = DEFAULT_TOL) -> ClosenessReport:
    """Quadratic closeness q, weighted q_Lambda, q_0, and mu = ||T_F - T_G||.

    dual_for_weight supplies the dual whose vector norms weight q_Lambda;
    the literal "canonical" (default) uses the canonical dual, in which case
    q_weighted == q0.
    """
    _check_same_shape(F, G)
    diff_norms = np.linalg.norm(synthesis_matrix(F) - synthesis_matrix(G), axis=0)
    q = float(np.sum(diff_norms**2))
    mu = frame_norm_distance(F, G)

    canon = canonical_dual(F, tol)
    canon_norms = np.linalg.norm(synthesis_matrix(canon), axis=0)
    q0 = float(np.sum(diff_norms * canon_norms))

    if isinstance(dual_for_weight, str):
        if dual_for_weight != "canonical":
            raise InputError(f"unknown dual_for_weight flag {dual_for_weight!r}")
        q_weighted = q0
    else:
        if not is_dual_pair(F, dual_for_weight, tol):
            raise InputError("dual_for_weight is not a dual of F")
        w_norms = np.linalg.norm(synthesis_matrix(dual_for_weight), axis=0)
        q_weighted = float(np.sum(diff_norms * w_norms))

    m_opt = frame_bounds(F).lower_opt
    return ClosenessReport(
        q=q, q_weighted=q_weighted, q0=q0, mu=mu,
        d_quad_flag=bool(m_opt <= q and math.isfinite(q_weighted)),
        c_quad_flag=bool(math.isfinite(q0)),
    )


# ---------------------------------------------------------------------------
# subspace gaps


@dataclass(frozen=True)
class GapReport:
    delta_xy: float
    delta_yx: float
    Delta: float
    isomorphic_projections: bool


def _one_sided_gap(Qx: np.ndarray, Qy: np.ndarray) -> float:
    """||(I - P_Y)|_X|| from orthonormal bases, via the cross-Gram spectrum."""
    kx, ky = Qx.shape[1], Qy.shape[1]
    if kx == 0:
        return 0.0
    if ky < kx:
        return 1.0
    s = np.linalg.svd(adjoint(Qy) @ Qx, compute_uv=False)
    smin = float(s[-1]) if s.size else 0.0
    return float(np.sqrt(max(0.0, 1.0 - min(smin, 1.0) ** 2)))


def gap_from_bases(Qx: np.ndarray, Qy: np.ndarray) -> GapReport:
    dxy = _one_sided_gap(Qx, Qy)
    dyx = _one_sided_gap(Qy, Qx)
    Delta = max(dxy, dyx)
    return GapReport(delta_xy=dxy, delta_yx=dyx, Delta=Delta,
                     isomorphic_projections=Delta < 1.0)


def subspace_gap(X_span, Y_span, tol: TolerancePolicy = DEFAULT_TOL) -> GapReport:
    """One-sided gaps delta(X, Y), delta(Y, X) and the symmetric distance."""
    X = as_cmatrix(X_span)
    Y = as_cmatrix(Y_span)
    if X.shape[0] != Y.shape[0]:
        raise InputError("spanning sets live in different ambient dimensions")
    return gap_from_bases(range_basis(X, tol), range_basis(Y, tol))


def analysis_range_gap(F: Frame, G: Frame,
                       tol: TolerancePolicy = DEFAULT_TOL) -> GapReport:
    """Gap between ran(U_F) and ran(U_G) inside coefficient space."""
    return gap_from_bases(analysis_range_basis(F, tol), analysis_range_basis(G, tol))


def gap_bound_audit(F: Frame, G: Frame, tol: TolerancePolicy = DEFAULT_TOL) -> BoundAudit:
    """delta(ran U_F, ran U_G) <= ||T_F - T_G|| / sqrt(m_opt(F))."""
    _check_same_shape(F, G)
    gap = analysis_range_gap(F, G, tol)
    m = frame_bounds(F).lower_opt
    mu = frame_norm_distance(F, G)
    return make_audit("gap-11", gap.delta_xy, mu / math.sqrt(m))


# ---------------------------------------------------------------------------
# frame-preservation audits under the three closeness regimes


def per1200_audit(F: Frame, G: Frame, variant: str, dual_for_weight="canonical",
                  tol: TolerancePolicy = DEFAULT_TOL) -> list[BoundAudit]:
    """Audit the predicted bounds for the perturbed family per closeness variant.

    variant: "d-quad" (weighted closeness), "c-quad" (canonical weighting),
    or "mu" (synthesis-distance perturbation).
    """
    if variant not in ("d-quad", "c-quad", "mu"):
        raise InputError(f"unknown variant {variant!r}")
    rep = closeness(F, G, dual_for_weight, tol)
    bF = frame_bounds(F)
    bG = frame_bounds(G)
    m, M = bF.lower_opt, bF.upper_opt
    q, mu = rep.q, rep.mu
    gap = analysis_range_gap(F, G, tol).Delta

    audits: list[BoundAudit] = []
    if variant == "mu":
        ok = mu < math.sqrt(m)
        lower = (math.sqrt(m) - mu) ** 2 if ok else float("nan")
        upper = (math.sqrt(M) + mu) ** 2
        gap_rhs = mu / (math.sqrt(m) - mu) if ok else float("nan")
        audits.append(make_audit("per1200(3).lower", lower, bG.lower_opt, ok))
        audits.append(make_audit("per1200(3).upper", bG.upper_opt, upper, ok))
        audits.append(make_audit("per1200(3).gap", gap, gap_rhs, ok))
    elif variant == "c-quad":
        q0 = rep.q0
        ok = q0 < 1.0
        lower = m * (1.0 - q0) ** 2 if ok else float("nan")
        upper = M * (1.0 + math.sqrt(q / M)) ** 2
        gap_rhs = math.sqrt(q / m) / (1.0 - q0) if ok else float("nan")
        audits.append(make_audit("per1200(2).lower", lower, bG.lower_opt, ok))
        audits.append(make_audit("per1200(2).upper", bG.upper_opt, upper, ok))
        audits.append(make_audit("per1200(2).gap", gap, gap_rhs, ok))
    else:
        qL = rep.q_weighted
        if isinstance(dual_for_weight, str):
            weight_dual = canonical_dual(F, tol)
        else:
            weight_dual = dual_for_weight
        M_L = frame_bounds(weight_dual).upper_opt
        ok = rep.d_quad_flag and qL < 1.0
        lower = (1.0 / M_L) * (1.0 - qL) ** 2 if ok else float("nan")
        upper = M * (1.0 + math.sqrt(q / M)) ** 2
        case_a = math.sqrt(m * M_L) <= 1.0 - qL
        audits.append(make_audit("per1200(1).lower", lower, bG.lower_opt, ok))
        audits.append(make_audit("per1200(1).upper", bG.upper_opt, upper, ok))
        if case_a:
            audits.append(make_audit("per1200(1a).gap", gap, math.sqrt(q / m), ok))
        else:
            gap_rhs = math.sqrt(q * M_L) / (1.0 - qL) if ok else float("nan")
            audits.append(make_audit("per1200(1b).gap", gap, gap_rhs, ok))
    return audits


# ---------------------------------------------------------------------------
# the synthesis-difference identity


def dis_identity_residual(F: Frame, G: Frame, P1: ApproxDualParams,
                          P2: ApproxDualParams,
                          tol: TolerancePolicy = DEFAULT_TOL) -> tuple[float, float]:
    """Residual of the exact identity decomposing the dual synthesis difference.

    Returns (residual, scale) where scale is the largest summand norm; the
    identity contract is residual <= 1e-9 * scale.
    """
    _check_same_shape(F, G)
    P1 = validate_params(F, P1, tol)
    P2 = validate_params(G, P2, tol)
    T_dualF = dual_synthesis(F, P1)
    T_dualG = dual_synthesis(G, P2)
    T_Gcanon = synthesis_matrix(canonical_dual(G, tol))
    U_F = analysis_matrix(F)
    U_G = analysis_matrix(G)

    t1 = T_dualF @ (U_F - U_G) @ T_Gcanon
    t2 = adjoint(P2.Theta)
    t3 = adjoint(project_onto_synthesis_kernel(G, adjoint(T_dualF), tol))
    t4 = (adjoint(P1.A) - adjoint(P2.A)) @ T_Gcanon

    lhs = T_dualG - T_dualF
    rhs = t1 + t2 - t3 - t4
    residual = operator_norm(lhs - rhs)
    scale = max(operator_norm(t) for t in (lhs, t1, t2, t3, t4))
    return residual, max(scale, 1.0)


# ---------------------------------------------------------------------------
# best approximation of a dual under perturbation


def theta_ba(F: Frame, G: Frame, P1: ApproxDualParams,
             tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """P_{ker T_G} applied to the analysis operator of the F-dual from P1."""
    P1 = validate_params(F, P1, tol)
    U_dualF = adjoint(dual_synthesis(F, P1))
    return project_onto_synthesis_kernel(G, U_dualF, tol)


@dataclass(frozen=True)
class BestApproxResult:
    report: ApproxDualReport
    lambda_bound: BoundAudit
    optimality: BoundAudit
    distance: float
    exact_distance: float


def best_approx_dual(F: Frame, G: Frame, P1: ApproxDualParams, A2,
                     trials: int = 100, seed: int = 0,
                     tol: TolerancePolicy = DEFAULT_TOL) -> BestApproxResult:
    """Build the G-dual with the kernel-projected analysis operator.

    The result is the closest approximately dual frame of G to the given
    F-dual in synthesis-operator norm. Audited two ways: randomized
    competitor sampling, and the exact projected-distance identity.
    """
    from .rand import random_kernel_theta, stream_rng

    _check_same_shape(F, G)
    mu = frame_norm_distance(F, G)
    m = frame_bounds(F).lower_opt
    if mu >= math.sqrt(m):
        raise PreconditionFailure(f"mu = {mu} >= sqrt(m_opt) = {math.sqrt(m)}")
    P1 = validate_params(F, P1, tol)
    A2 = as_cmatrix(A2)

    Tba = theta_ba(F, G, P1, tol)
    P2 = validate_params(G, ApproxDualParams(A=A2, Theta=Tba), tol)
    report = build_approx_dual(G, P2, tol, validated=True)

    T_dualF = dual_synthesis(F, P1)
    T_dualG = dual_synthesis(G, P2)
    dist = operator_norm(T_dualG - T_dualF)

    A1 = P1.A
    dA = operator_norm(A1 - A2)
    lam = (mu / (math.sqrt(m) - mu)) * (operator_norm(A1) / math.sqrt(m)
                                        + operator_norm(P1.Theta)) \
        + dA / (math.sqrt(m) - mu)
    lambda_bound = make_audit("best-app.lambda", dist, lam)

    # exact value: distance restricted to the analysis range of G
    T_Gcanon = synthesis_matrix(canonical_dual(G, tol))
    Qg = analysis_range_basis(G, tol)
    exact = operator_norm((adjoint(A2) @ T_Gcanon - T_dualF) @ Qg)

    rng = stream_rng(seed, "best-approx-optimality")
    best_rival = float("inf")
    for _ in range(trials):
        Lam = random_kernel_theta(rng, G, norm_scale=2.0, tol=tol)
        T_rival = adjoint(A2) @ T_Gcanon + adjoint(Lam)
        best_rival = min(best_rival, operator_norm(T_rival - T_dualF))
    optimality = make_audit("best-app.optimality", dist, best_rival)
    return BestApproxResult(report=report, lambda_bound=lambda_bound,
                            optimality=optimality, distance=dist,
                            exact_distance=exact)


# ---------------------------------------------------------------------------
# deviation bounds for canonical and best-approximation duals


def deviation_bound_audit(kind: str, F: Frame, G: Frame, A1, A2,
                          Lambda_dual=None, theta=None,
                          tol: TolerancePolicy = DEFAULT_TOL) -> list[BoundAudit]:
    """Audit the displayed deviation bound for the given closeness regime.

    kind: "cad" (canonical duals, mu-perturbation), "prop-dis" (canonical
    dual vs canonical approximately dual, single A), "d-quad" or "c-quad"
    (quadratic-closeness regimes; lhs pairs the best-approximation dual of G
    with the Theta-dual of F, plus the canonical-pair bound).
    """
    if kind not in ("cad", "prop-dis", "d-quad", "c-quad"):
        raise InputError(f"unknown deviation audit kind {kind!r}")
    _check_same_shape(F, G)
    A1 = as_cmatrix(A1)
    A2 = as_cmatrix(A2)
    m = frame_bounds(F).lower_opt
    sm = math.sqrt(m)
    mu = frame_norm_distance(F, G)
    nA1 = operator_norm(A1)
    dA = operator_norm(A1 - A2)

    audits: list[BoundAudit] = []

    if kind in ("cad", "prop-dis"):
        ok = mu < sm
        if not ok:
            names = (["cad.bound1", "cad.bound2"] if kind == "cad"
                     else ["prop-dis.bound"])
            return [make_audit(n, float("nan"), float("nan"), False) for n in names]
        if kind == "cad":
            TF0 = synthesis_matrix(canonical_approx_dual(F, A1, tol).dual)
            TG0 = synthesis_matrix(canonical_approx_dual(G, A2, tol).dual)
            lhs = operator_norm(TF0 - TG0)
            rhs1 = 2 * mu * nA1 / (sm * (sm - mu)) + dA / (sm - mu)
            eps1 = operator_norm(A1 - np.eye(F.dim))
            eps2 = operator_norm(A2 - np.eye(F.dim))
            rhs2 = (2 * mu / (sm * (sm - mu))
                    + eps1 * (2 * mu + sm) / (sm * (sm - mu))
                    + eps2 / (sm - mu))
            audits.append(make_audit("cad.bound1", lhs, rhs1))
            audits.append(make_audit("cad.bound2", lhs, rhs2))
        else:
            Tcanon = synthesis_matrix(canonical_dual(F, tol))
            TG0 = synthesis_matrix(canonical_approx_dual(G, A1, tol).dual)
            lhs = operator_norm(Tcanon - TG0)
            eps = operator_norm(A1 - np.eye(F.dim))
            rhs = (2 * mu * nA1 + eps * sm) / (sm * (sm - mu))
            audits.append(make_audit("prop-dis.bound", lhs, rhs))
        return audits

    # quadratic-closeness regimes
    rep = closeness(F, G, Lambda_dual if Lambda_dual is not None else "canonical", tol)
    q = rep.q
    sq = math.sqrt(q)
    if theta is None:
        theta = np.zeros((F.n_vectors, F.dim), dtype=np.complex128)
    nTheta = operator_norm(theta)

    if kind == "d-quad":
        qL = rep.q_weighted
        weight_dual = (canonical_dual(F, tol) if Lambda_dual is None else Lambda_dual)
        M_L = frame_bounds(weight_dual).upper_opt
        ok = rep.d_quad_flag and qL < 1.0
        prefix = "d-quad"
        pair_rhs = (math.sqrt(q * M_L) / (1.0 - qL)
                    * (nA1 / sm + nTheta + dA / sq)) if ok and q > 0 else float("nan")
        case_a = math.sqrt(m * M_L) <= 1.0 - qL
        canon_rhs = ((2 * sq * nA1 + sm * dA) / m if case_a
                     else (math.sqrt(M_L) / (1.0 - qL)) * (2 * nA1 * math.sqrt(q / m) + dA)
                     ) if ok else float("nan")
        canon_name = f"{prefix}.canonical({'1' if case_a else '2'})"
        pair_name = f"{prefix}.rho"
    else:
        q0 = rep.q0
        ok = q0 < 1.0
        prefix = "c-quad"
        pair_rhs = (sq / (sm * (1.0 - q0)) * (nA1 / sm + nTheta)
                    + dA / (sm * (1.0 - q0))) if ok else float("nan")
        canon_rhs = ((2 * nA1 * math.sqrt(q / m) + dA)
                     / (sm * (1.0 - q0))) if ok else float("nan")
        canon_name = f"{prefix}.canonical"
        pair_name = f"{prefix}.upsilon"

    if not ok:
        return [make_audit(pair_name, float("nan"), float("nan"), False),
                make_audit(canon_name, float("nan"), float("nan"), False)]

    # the regime guarantees G is a frame, so the duals below exist
    P1 = validate_params(F, ApproxDualParams(A=A1, Theta=theta), tol)
    T_dualF = dual_synthesis(F, P1)
    Tba = theta_ba(F, G, P1, tol)
    P2 = validate_params(G, ApproxDualParams(A=A2, Theta=Tba), tol)
    pair_lhs = operator_norm(dual_synthesis(G, P2) - T_dualF)
    audits.append(make_audit(pair_name, pair_lhs, pair_rhs))

    TF0 = synthesis_matrix(canonical_approx_dual(F, A1, tol).dual)
    TG0 = synthesis_matrix(canonical_approx_dual(G, A2, tol).dual)
    audits.append(make_audit(canon_name, operator_norm(TF0 - TG0), canon_rhs))
    return audits


# ---------------------------------------------------------------------------
# the parameter bijection between dual sets under small perturbation


def _check_gamma_hypothesis(F: Frame, G: Frame) -> None:
    mu = frame_norm_distance(F, G)
    bound = math.sqrt(frame_bounds(F).lower_opt) / 2
    if mu >= bound:
        raise PreconditionFailure(f"mu = {mu} >= sqrt(m_opt)/2 = {bound}")


def gamma_map(F: Frame, G: Frame, P: ApproxDualParams,
              tol: TolerancePolicy = DEFAULT_TOL) -> ApproxDualParams:
    """Map F-dual parameters (A, Theta) to G-dual parameters (A, Theta_ba)."""
    _check_gamma_hypothesis(F, G)
    P = validate_params(F, P, tol)
    Tba = theta_ba(F, G, P, tol)
    return validate_params(G, ApproxDualParams(A=P.A, Theta=Tba), tol)


def gamma_inverse(F: Frame, G: Frame, Lambda, A,
                  tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Recover the F-side Theta whose image under gamma_map is Lambda.

    Inverts the restricted projection ker(T_F) -> ker(T_G) through
    orthonormal kernel bases; the small-perturbation hypothesis guarantees
    the restriction is an isomorphism.
    """
    _check_gamma_hypothesis(F, G)
    Lambda = as_cmatrix(Lambda)
    A = as_cmatrix(A)
    B_F = kernel_basis(synthesis_matrix(F), tol)
    B_G = kernel_basis(synthesis_matrix(G), tol)
    U_Fcanon = analysis_matrix(canonical_dual(F, tol))
    Y = Lambda - project_onto_synthesis_kernel(G, U_Fcanon @ A, tol)

    cross = adjoint(B_G) @ B_F
    if cross.size:
        s = np.linalg.svd(cross, compute_uv=False)
        if s.size < B_F.shape[1] or (s.size and s[-1] < 1e-8):
            raise GapHypothesisViolation("kernel-to-kernel restriction is singular")
    coeffs = pseudo_inverse(cross, tol) @ (adjoint(B_G) @ Y)
    return B_F @ coeffs
