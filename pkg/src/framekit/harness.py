"""Randomized audit corpus: deterministic instance generation + full audit sweep.

Each trial draws its own named random stream from the master seed, so the
set of audits can grow without shifting existing instances. The summary
counts applicable / holds / violated / not-applicable per audit name;
diagnostic (open-question) audits are tallied separately and never count
as violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import DEFAULT_TOL, TolerancePolicy, operator_norm
from .frames import Frame, excess, frame_bounds, frame_norm_distance, synthesis_matrix
from .approxdual import (
    ApproxDualParams,
    build_approx_dual,
    canonical_approx_dual,
    minimal_norm_audit,
    validate_params,
)
from .perturbation import (
    BoundAudit,
    PreconditionFailure,
    best_approx_dual,
    deviation_bound_audit,
    dis_identity_residual,
    gamma_inverse,
    gamma_map,
    gap_bound_audit,
    make_audit,
    per1200_audit,
)
from .gabor import (
    GaborSystem,
    build_gabor_frame,
    correlation_r,
    envelope_audit,
    gabor_perturbation_audit,
    walnut_report,
)
from .exam import generate_exam
from .rand import (
    random_admissible_A,
    random_complex,
    random_frame,
    random_kernel_theta,
    small_perturbation,
    stream_rng,
)


@dataclass
class CorpusProfile:
    dims: tuple[int, ...] = (2, 3, 4, 5, 6)
    extra_vectors: tuple[int, ...] = (1, 2, 3, 4, 5, 6)
    gabor_lengths: tuple[int, ...] = (8, 12, 16)
    exam_blocks: tuple[int, ...] = (2, 3)


@dataclass
class CorpusResult:
    audits: list[BoundAudit] = field(default_factory=list)
    minimal_norm_instances: int = 0
    minimal_norm_equality_gaps: int = 0
    minimal_norm_violations: int = 0

    def summary(self) -> dict:
        per_name: dict[str, dict] = {}
        for a in self.audits:
            s = per_name.setdefault(a.name, {
                "applicable": 0, "holds": 0, "violated": 0,
                "not_applicable": 0, "diagnostic": a.diagnostic,
            })
            if not a.preconditions_met:
                s["not_applicable"] += 1
            else:
                s["applicable"] += 1
                if a.holds:
                    s["holds"] += 1
                elif not a.diagnostic:
                    s["violated"] += 1
        return {
            "audits": per_name,
            "minimal_norm": {
                "instances": self.minimal_norm_instances,
                "equality_gaps_flagged": self.minimal_norm_equality_gaps,
                "lowerbound_violations": self.minimal_norm_violations,
            },
            "violated_total": self.violated_total,
        }

    @property
    def violated_total(self) -> int:
        return (sum(1 for a in self.audits if a.violated)
                + self.minimal_norm_violations)


def _excess_audit(F: Frame, dual: Frame) -> BoundAudit:
    return make_audit("excess.preserved", abs(excess(F) - excess(dual)), 0.0)


def frame_trial(seed: int, index: int, profile: CorpusProfile,
                tol: TolerancePolicy = DEFAULT_TOL) -> tuple[list[BoundAudit], dict]:
    """One random mu-perturbation instance with all general-regime audits."""
    rng = stream_rng(seed, f"frame-trial-{index}")
    d = int(rng.choice(profile.dims))
    N = d + int(rng.choice(profile.extra_vectors))
    F = random_frame(rng, d, N)
    G = small_perturbation(rng, F, fraction=0.4)
    A1 = random_admissible_A(rng, d)
    A2 = random_admissible_A(rng, d)
    theta = random_kernel_theta(rng, F, tol=tol)

    audits: list[BoundAudit] = [gap_bound_audit(F, G, tol)]
    for variant in ("d-quad", "c-quad", "mu"):
        audits.extend(per1200_audit(F, G, variant, tol=tol))

    P1 = validate_params(F, ApproxDualParams(A=A1, Theta=theta), tol)
    P2 = validate_params(
        G, ApproxDualParams(A=A2, Theta=random_kernel_theta(rng, G, tol=tol)), tol)
    residual, scale = dis_identity_residual(F, G, P1, P2, tol)
    audits.append(make_audit("dis.identity", residual, 1e-9 * scale))

    audits.extend(deviation_bound_audit("cad", F, G, A1, A2, tol=tol))
    audits.extend(deviation_bound_audit("prop-dis", F, G, A1, A1, tol=tol))
    audits.extend(deviation_bound_audit("d-quad", F, G, A1, A2, theta=theta, tol=tol))
    audits.extend(deviation_bound_audit("c-quad", F, G, A1, A2, theta=theta, tol=tol))

    try:
        result = best_approx_dual(F, G, P1, A2, trials=20,
                                  seed=seed + index, tol=tol)
        audits.append(result.lambda_bound)
        audits.append(result.optimality)
        audits.append(make_audit("best-app.exact-identity",
                                 abs(result.distance - result.exact_distance),
                                 1e-9 * max(1.0, result.exact_distance)))
        audits.append(_excess_audit(F, result.report.dual))
    except PreconditionFailure:
        for name in ("best-app.lambda", "best-app.optimality",
                     "best-app.exact-identity"):
            audits.append(make_audit(name, float("nan"), float("nan"), False))

    # parameter-bijection round trips under the half-bound hypothesis
    mu = frame_norm_distance(F, G)
    if mu < np.sqrt(frame_bounds(F).lower_opt) / 2:
        image = gamma_map(F, G, P1, tol)
        theta_back = gamma_inverse(F, G, image.Theta, P1.A, tol)
        fwd = operator_norm(theta_back - P1.Theta)
        Lam = random_kernel_theta(rng, G, tol=tol)
        theta_pre = gamma_inverse(F, G, Lam, A1, tol)
        image2 = gamma_map(
            F, G, validate_params(F, ApproxDualParams(A=A1, Theta=theta_pre), tol), tol)
        bwd = operator_norm(image2.Theta - Lam)
        audits.append(make_audit("gamma.roundtrip", max(fwd, bwd), 1e-9))
    else:
        audits.append(make_audit("gamma.roundtrip", float("nan"), float("nan"), False))

    # canonical approximately duals keep the original excess
    audits.append(_excess_audit(F, canonical_approx_dual(F, A1, tol).dual))
    audits.append(_excess_audit(F, build_approx_dual(F, P1, tol, validated=True).dual))

    mn = minimal_norm_audit(F, A1, trials=5, seed=seed + index, tol=tol)
    stats = {
        "minimal_norm_ok": mn.canon_above_lowerbound and mn.trials_dominate_canon,
        "minimal_norm_gap": not mn.equality_holds,
    }
    return audits, stats


def exam_trial(seed: int, index: int, blocks: int,
               tol: TolerancePolicy = DEFAULT_TOL) -> list[BoundAudit]:
    """Quadratic-closeness regime on a truncated geometric-block pair."""
    rng = stream_rng(seed, f"exam-trial-{blocks}-{index}")
    pair = generate_exam(blocks)
    F, G = pair.original, pair.perturbed
    A1 = random_admissible_A(rng, F.dim, rho_max=0.5)
    A2 = random_admissible_A(rng, F.dim, rho_max=0.5)
    theta = random_kernel_theta(rng, F, tol=tol)
    audits = []
    for variant in ("d-quad", "c-quad", "mu"):
        audits.extend(per1200_audit(F, G, variant, tol=tol))
    audits.extend(deviation_bound_audit("d-quad", F, G, A1, A2, theta=theta, tol=tol))
    audits.extend(deviation_bound_audit("c-quad", F, G, A1, A2, theta=theta, tol=tol))
    return audits


def gabor_trial(seed: int, index: int, profile: CorpusProfile,
                tol: TolerancePolicy = DEFAULT_TOL) -> list[BoundAudit]:
    """Random cyclic Gabor system: Walnut sandwich, envelope, perturbation."""
    rng = stream_rng(seed, f"gabor-trial-{index}")
    L = int(rng.choice(profile.gabor_lengths))
    divisors = [k for k in range(1, L + 1) if L % k == 0]
    while True:
        a = int(rng.choice(divisors))
        b = int(rng.choice(divisors))
        if L // (a * b) >= 1:  # enough vectors to span C^L
            break
    g = random_complex(rng, L)
    g /= np.linalg.norm(g)
    sys1 = GaborSystem(L=L, a=a, b=b, window=g)
    F1 = build_gabor_frame(sys1)
    bounds = frame_bounds(F1)

    w = walnut_report(sys1)
    slack = 1e-9 * max(1.0, bounds.upper_opt)
    audits = [
        make_audit("walnut.sandwich.lower", w.lower_est, bounds.lower_opt + slack),
        make_audit("walnut.sandwich.upper", bounds.upper_opt, w.upper_est + slack),
        envelope_audit(sys1),
    ]

    dg = random_complex(rng, L)
    dg *= rng.uniform(0.005, 0.05) / np.linalg.norm(dg)
    g2 = g + dg
    r = correlation_r(sys1, g2)
    mu = frame_norm_distance(F1, build_gabor_frame(sys1.with_window(g2)))
    audits.append(make_audit("gabor.bessel-domination", mu, np.sqrt(r)))

    c1 = 1.0 + rng.uniform(-0.3, 0.3)
    c2 = 1.0 + rng.uniform(-0.3, 0.3)
    A1 = c1 * np.eye(L, dtype=np.complex128)
    A2 = c2 * np.eye(L, dtype=np.complex128)
    audits.extend(gabor_perturbation_audit(sys1, g2, A1, A2, tol=tol,
                                           trials=10, seed=seed + index))
    return audits


def run_corpus(seed: int, trials: int, profile: CorpusProfile | None = None,
               tol: TolerancePolicy = DEFAULT_TOL) -> CorpusResult:
    profile = profile or CorpusProfile()
    result = CorpusResult()
    for t in range(trials):
        audits, stats = frame_trial(seed, t, profile, tol)
        result.audits.extend(audits)
        result.minimal_norm_instances += 1
        if not stats["minimal_norm_ok"]:
            result.minimal_norm_violations += 1
        if stats["minimal_norm_gap"]:
            result.minimal_norm_equality_gaps += 1
    exam_rounds = max(1, trials // max(1, len(profile.exam_blocks)))
    for blocks in profile.exam_blocks:
        for t in range(exam_rounds):
            result.audits.extend(exam_trial(seed, t, blocks, tol))
    for t in range(max(1, trials // 2)):
        result.audits.extend(gabor_trial(seed, t, profile, tol))
    result.audits.sort(key=lambda a: a.name)
    return result
