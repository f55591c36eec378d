import numpy as np
import pytest

from framekit.approxdual import ApproxDualParams, validate_params
from framekit.frames import (
    Frame,
    analysis_matrix,
    canonical_dual,
    frame_bounds,
    frame_norm_distance,
    synthesis_matrix,
)
from framekit.linalg import InputError, adjoint, kernel_basis, operator_norm
from framekit.perturbation import (
    GapHypothesisViolation,
    PreconditionFailure,
    analysis_range_gap,
    best_approx_dual,
    closeness,
    deviation_bound_audit,
    dis_identity_residual,
    gamma_inverse,
    gamma_map,
    gap_bound_audit,
    make_audit,
    per1200_audit,
    subspace_gap,
    theta_ba,
)
from framekit.rand import (
    random_admissible_A,
    random_frame,
    random_kernel_theta,
    small_perturbation,
    stream_rng,
)

rng = np.random.default_rng(31337)


def _instance(seed, d=None, extra=None, fraction=0.4):
    r = np.random.default_rng(seed)
    d = d or int(r.integers(2, 6))
    N = d + (extra if extra is not None else int(r.integers(1, 5)))
    F = random_frame(r, d, N)
    G = small_perturbation(r, F, fraction=fraction)
    return r, F, G


class TestMakeAudit:
    def test_holds_within_tolerance(self):
        assert make_audit("x", 1.0, 1.0).holds
        assert make_audit("x", 1.0 + 5e-10, 1.0).holds
        assert not make_audit("x", 1.01, 1.0).holds

    def test_not_applicable_never_holds(self):
        a = make_audit("x", float("nan"), float("nan"), False)
        assert not a.preconditions_met and not a.holds and not a.violated

    def test_diagnostic_never_violated(self):
        a = make_audit("x", 2.0, 1.0, diagnostic=True)
        assert not a.holds and not a.violated

    def test_to_dict_has_exactly_the_wire_keys(self):
        a = make_audit("x", 0.0, 1.0)
        assert set(a.to_dict()) == {"name", "lhs", "rhs", "preconditions_met",
                                    "holds", "slack"}


class TestCloseness:
    def test_identical_frames(self):
        _, F, _ = _instance(0)
        rep = closeness(F, F)
        assert rep.q == 0.0 and rep.q0 == 0.0 and rep.mu == 0.0

    def test_q_is_sum_of_squared_column_distances(self):
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=np.array([[1.0, 0.3], [0.4, 1.0]]))
        rep = closeness(F, G)
        assert rep.q == pytest.approx(0.16 + 0.09, abs=1e-12)

    def test_canonical_weighting_on_parseval(self):
        # Parseval frame: canonical dual = frame itself, q0 = sum |dphi| * |phi|
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=np.array([[1.0, 0.0], [0.0, 1.5]]))
        rep = closeness(F, G)
        assert rep.q0 == pytest.approx(0.5, abs=1e-12)
        assert rep.q_weighted == rep.q0

    def test_explicit_dual_weighting(self):
        _, F, G = _instance(3)
        rep_c = closeness(F, G)
        rep_d = closeness(F, G, dual_for_weight=canonical_dual(F))
        assert rep_d.q_weighted == pytest.approx(rep_c.q0, rel=1e-10)

    def test_non_dual_weighting_rejected(self):
        _, F, G = _instance(4)
        with pytest.raises(InputError):
            closeness(F, G, dual_for_weight=G)

    def test_mu_matches_frame_distance(self):
        _, F, G = _instance(5)
        assert closeness(F, G).mu == pytest.approx(frame_norm_distance(F, G), abs=1e-12)


class TestSubspaceGap:
    def test_identical_subspaces(self):
        rep = subspace_gap(np.eye(3)[:, :2], np.eye(3)[:, :2])
        assert rep.Delta == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_lines(self):
        rep = subspace_gap(np.eye(2)[:, :1], np.eye(2)[:, 1:])
        assert rep.delta_xy == pytest.approx(1.0, abs=1e-12)
        assert not rep.isomorphic_projections

    def test_forty_five_degree_lines(self):
        X = np.array([[1.0], [0.0]])
        Y = np.array([[1.0], [1.0]])
        rep = subspace_gap(X, Y)
        assert rep.delta_xy == pytest.approx(1.0 / np.sqrt(2), abs=1e-12)
        assert rep.delta_yx == pytest.approx(1.0 / np.sqrt(2), abs=1e-12)

    def test_line_inside_plane(self):
        X = np.eye(3)[:, :1]
        Y = np.eye(3)[:, :2]
        rep = subspace_gap(X, Y)
        assert rep.delta_xy == pytest.approx(0.0, abs=1e-12)
        assert rep.delta_yx == pytest.approx(1.0, abs=1e-12)

    def test_duality_with_orthocomplements(self):
        # delta(X, Y) = delta(Y-perp, X-perp) when both gaps are < 1
        r = np.random.default_rng(8)
        X = r.standard_normal((5, 2)) + 1j * r.standard_normal((5, 2))
        Y = X + 0.2 * (r.standard_normal((5, 2)) + 1j * r.standard_normal((5, 2)))
        rep = subspace_gap(X, Y)
        Xp = kernel_basis(adjoint(X))
        Yp = kernel_basis(adjoint(Y))
        rep_p = subspace_gap(Yp, Xp)
        assert rep.delta_xy == pytest.approx(rep_p.delta_xy, abs=1e-10)

    def test_projection_oracle(self):
        # delta(X, Y) against the direct definition via dense projectors
        r = np.random.default_rng(9)
        X = r.standard_normal((6, 2))
        Y = r.standard_normal((6, 3))
        rep = subspace_gap(X, Y)
        Qx, _ = np.linalg.qr(X)
        Qy, _ = np.linalg.qr(Y)
        Py = Qy @ Qy.T
        direct = operator_norm((np.eye(6) - Py) @ Qx)
        assert rep.delta_xy == pytest.approx(direct, abs=1e-10)

    def test_ambient_mismatch_rejected(self):
        with pytest.raises(InputError):
            subspace_gap(np.eye(2), np.eye(3))


class TestGapBound:
    def test_holds_on_random_pairs(self):
        for seed in range(30):
            _, F, G = _instance(seed)
            audit = gap_bound_audit(F, G)
            assert audit.preconditions_met and audit.holds

    def test_zero_perturbation_gives_zero_gap(self):
        # sqrt(1 - sigma^2) halves the working precision near sigma = 1,
        # so the computed gap of a subspace with itself sits near 1e-8
        _, F, _ = _instance(50)
        audit = gap_bound_audit(F, F)
        assert audit.lhs == pytest.approx(0.0, abs=1e-7)


class TestPer1200:
    def test_mu_variant_holds_small_perturbation(self):
        for seed in range(20):
            _, F, G = _instance(seed, fraction=0.3)
            for a in per1200_audit(F, G, "mu"):
                assert a.preconditions_met and a.holds

    def test_mu_variant_not_applicable_when_far(self):
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=5.0 * np.eye(2))
        audits = per1200_audit(F, G, "mu")
        # mu = 4 >= sqrt(m) = 1: lower and gap bounds are off
        by_name = {a.name: a for a in audits}
        assert not by_name["per1200(3).lower"].preconditions_met
        assert not by_name["per1200(3).gap"].preconditions_met

    def test_c_quad_variant_holds(self):
        for seed in range(20):
            _, F, G = _instance(seed, fraction=0.2)
            if closeness(F, G).q0 >= 1.0:
                continue
            for a in per1200_audit(F, G, "c-quad"):
                assert a.holds

    def test_d_quad_variant_names(self):
        _, F, G = _instance(7, fraction=0.2)
        names = {a.name for a in per1200_audit(F, G, "d-quad")}
        assert "per1200(1).lower" in names and "per1200(1).upper" in names
        assert any(n.startswith("per1200(1") and n.endswith(".gap") for n in names)

    def test_unknown_variant_rejected(self):
        _, F, G = _instance(7)
        with pytest.raises(InputError):
            per1200_audit(F, G, "bogus")


class TestDisIdentity:
    def test_exact_on_random_instances(self):
        for seed in range(25):
            r, F, G = _instance(seed)
            P1 = ApproxDualParams(A=random_admissible_A(r, F.dim),
                                  Theta=random_kernel_theta(r, F))
            P2 = ApproxDualParams(A=random_admissible_A(r, G.dim),
                                  Theta=random_kernel_theta(r, G))
            residual, scale = dis_identity_residual(F, G, P1, P2)
            assert residual <= 1e-9 * scale

    def test_trivial_case_zero(self):
        _, F, _ = _instance(60)
        P = ApproxDualParams(A=np.eye(F.dim),
                             Theta=np.zeros((F.n_vectors, F.dim)))
        residual, scale = dis_identity_residual(F, F, P, P)
        assert residual <= 1e-12 * scale


class TestBestApprox:
    def test_distance_equals_exact_identity(self):
        for seed in range(15):
            r, F, G = _instance(seed, fraction=0.3)
            P1 = ApproxDualParams(A=random_admissible_A(r, F.dim),
                                  Theta=random_kernel_theta(r, F))
            A2 = random_admissible_A(r, F.dim)
            result = best_approx_dual(F, G, P1, A2, trials=30, seed=seed)
            assert result.distance == pytest.approx(result.exact_distance, abs=1e-10)
            assert result.lambda_bound.holds
            assert result.optimality.holds

    def test_theta_ba_lands_in_perturbed_kernel(self):
        r, F, G = _instance(70, fraction=0.3)
        P1 = ApproxDualParams(A=random_admissible_A(r, F.dim),
                              Theta=random_kernel_theta(r, F))
        Tba = theta_ba(F, G, P1)
        assert operator_norm(synthesis_matrix(G) @ Tba) < 1e-9

    def test_precondition_failure_when_far(self):
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=5.0 * np.eye(2))
        P1 = ApproxDualParams(A=np.eye(2), Theta=np.zeros((2, 2)))
        with pytest.raises(PreconditionFailure):
            best_approx_dual(F, G, P1, np.eye(2))

    def test_zero_perturbation_zero_extra_distance(self):
        # G = F, A2 = A1, Theta = Theta_ba(Theta): the map is the identity
        r, F, _ = _instance(71)
        A = random_admissible_A(r, F.dim)
        theta = random_kernel_theta(r, F)
        P1 = ApproxDualParams(A=A, Theta=theta)
        result = best_approx_dual(F, F, P1, A, trials=5, seed=1)
        assert result.distance < 1e-9


class TestDeviationBounds:
    def test_cad_and_prop_dis_hold(self):
        for seed in range(15):
            r, F, G = _instance(seed, fraction=0.3)
            A1 = random_admissible_A(r, F.dim)
            A2 = random_admissible_A(r, F.dim)
            for a in deviation_bound_audit("cad", F, G, A1, A2):
                assert a.preconditions_met and a.holds
            for a in deviation_bound_audit("prop-dis", F, G, A1, A1):
                assert a.preconditions_met and a.holds

    def test_quadratic_regimes_hold(self):
        for seed in range(15):
            r, F, G = _instance(seed, fraction=0.2)
            A1 = random_admissible_A(r, F.dim)
            A2 = random_admissible_A(r, F.dim)
            theta = random_kernel_theta(r, F)
            for kind in ("d-quad", "c-quad"):
                for a in deviation_bound_audit(kind, F, G, A1, A2, theta=theta):
                    if a.preconditions_met:
                        assert a.holds

    def test_cad_not_applicable_when_far(self):
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=5.0 * np.eye(2))
        audits = deviation_bound_audit("cad", F, G, np.eye(2), np.eye(2))
        assert all(not a.preconditions_met for a in audits)

    def test_unknown_kind_rejected(self):
        _, F, G = _instance(80)
        with pytest.raises(InputError):
            deviation_bound_audit("nope", F, G, np.eye(F.dim), np.eye(F.dim))


class TestGammaBijection:
    def test_forward_then_inverse(self):
        for seed in range(15):
            r, F, G = _instance(seed, fraction=0.3)
            if frame_norm_distance(F, G) >= np.sqrt(frame_bounds(F).lower_opt) / 2:
                continue
            A = random_admissible_A(r, F.dim)
            theta = random_kernel_theta(r, F)
            P = validate_params(F, ApproxDualParams(A=A, Theta=theta))
            image = gamma_map(F, G, P)
            back = gamma_inverse(F, G, image.Theta, A)
            assert operator_norm(back - P.Theta) <= 1e-9

    def test_inverse_then_forward(self):
        for seed in range(15):
            r, F, G = _instance(seed, fraction=0.3)
            if frame_norm_distance(F, G) >= np.sqrt(frame_bounds(F).lower_opt) / 2:
                continue
            A = random_admissible_A(r, F.dim)
            Lam = random_kernel_theta(r, G)
            theta = gamma_inverse(F, G, Lam, A)
            P = validate_params(F, ApproxDualParams(A=A, Theta=theta))
            image = gamma_map(F, G, P)
            assert operator_norm(image.Theta - Lam) <= 1e-9

    def test_hypothesis_enforced(self):
        F = Frame(dim=2, matrix=np.eye(2))
        G = Frame(dim=2, matrix=5.0 * np.eye(2))
        P = ApproxDualParams(A=np.eye(2), Theta=np.zeros((2, 2)))
        with pytest.raises(PreconditionFailure):
            gamma_map(F, G, P)
        with pytest.raises(PreconditionFailure):
            gamma_inverse(F, G, np.zeros((2, 2)), np.eye(2))
