import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from framekit.frames import (
    Frame,
    NotAFrameError,
    analysis_matrix,
    analysis_range_basis,
    canonical_dual,
    excess,
    frame_bounds,
    frame_norm_distance,
    frame_operator,
    is_dual_pair,
    is_frame,
    project_onto_synthesis_kernel,
    synthesis_matrix,
)
from framekit.linalg import InputError, adjoint, operator_norm

rng = np.random.default_rng(77)


def random_frame(d, N):
    return Frame(dim=d, matrix=rng.standard_normal((d, N))
                 + 1j * rng.standard_normal((d, N)))


MERCEDES = Frame.from_vectors([
    [0.0, 1.0],
    [-np.sqrt(3) / 2, -0.5],
    [np.sqrt(3) / 2, -0.5],
])


class TestConstruction:
    def test_from_vectors_shape(self):
        assert MERCEDES.dim == 2 and MERCEDES.n_vectors == 3

    def test_matrix_is_frozen(self):
        with pytest.raises(ValueError):
            MERCEDES.matrix[0, 0] = 5.0

    def test_rejects_row_mismatch(self):
        with pytest.raises(InputError):
            Frame(dim=3, matrix=np.eye(2))

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            Frame(dim=2, matrix=np.zeros((2, 0)))

    def test_analysis_is_adjoint_of_synthesis(self):
        F = random_frame(3, 5)
        assert np.allclose(analysis_matrix(F), adjoint(synthesis_matrix(F)))


class TestFrameBoundsAndDual:
    def test_orthonormal_basis_is_parseval(self):
        b = frame_bounds(Frame(dim=3, matrix=np.eye(3)))
        assert b.lower_opt == pytest.approx(1.0, abs=1e-12)
        assert b.upper_opt == pytest.approx(1.0, abs=1e-12)
        assert b.tight

    def test_mercedes_is_tight_three_halves(self):
        assert np.allclose(frame_operator(MERCEDES), 1.5 * np.eye(2), atol=1e-12)
        b = frame_bounds(MERCEDES)
        assert b.lower_opt == pytest.approx(1.5, abs=1e-12)
        assert b.upper_opt == pytest.approx(1.5, abs=1e-12)
        assert b.tight

    def test_mercedes_canonical_dual_is_rescaled(self):
        dual = canonical_dual(MERCEDES)
        assert np.allclose(dual.matrix, (2.0 / 3.0) * MERCEDES.matrix, atol=1e-12)
        assert is_dual_pair(MERCEDES, dual)

    def test_repeated_vector_family_bounds(self):
        F = Frame.from_vectors([[1, 0], [1, 0], [0, 1]])
        b = frame_bounds(F)
        assert b.lower_opt == pytest.approx(1.0, abs=1e-12)
        assert b.upper_opt == pytest.approx(2.0, abs=1e-12)
        assert not b.tight

    def test_frame_inequality_random_vectors(self):
        F = random_frame(4, 7)
        b = frame_bounds(F)
        for _ in range(50):
            f = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            energy = float(np.sum(np.abs(analysis_matrix(F) @ f) ** 2))
            nf2 = float(np.real(np.vdot(f, f)))
            assert b.lower_opt * nf2 - 1e-9 <= energy <= b.upper_opt * nf2 + 1e-9

    def test_non_spanning_family_is_not_a_frame(self):
        F = Frame.from_vectors([[1, 0], [2, 0]])
        assert not is_frame(F)
        with pytest.raises(NotAFrameError):
            canonical_dual(F)

    def test_canonical_dual_reconstructs(self):
        F = random_frame(3, 6)
        dual = canonical_dual(F)
        R = synthesis_matrix(F) @ adjoint(synthesis_matrix(dual))
        assert operator_norm(R - np.eye(3)) < 1e-10

    def test_double_canonical_dual_is_identity(self):
        F = random_frame(3, 5)
        back = canonical_dual(canonical_dual(F))
        assert operator_norm(back.matrix - F.matrix) < 1e-9

    def test_dual_bounds_are_reciprocal(self):
        F = random_frame(3, 5)
        b = frame_bounds(F)
        bd = frame_bounds(canonical_dual(F))
        assert bd.lower_opt == pytest.approx(1.0 / b.upper_opt, rel=1e-9)
        assert bd.upper_opt == pytest.approx(1.0 / b.lower_opt, rel=1e-9)


class TestExcess:
    def test_basis_has_zero_excess(self):
        assert excess(Frame(dim=3, matrix=np.eye(3))) == 0

    def test_mercedes_has_excess_one(self):
        assert excess(MERCEDES) == 1

    def test_generic_excess_is_n_minus_d(self):
        assert excess(random_frame(4, 9)) == 5


class TestDistance:
    def test_self_distance_zero(self):
        assert frame_norm_distance(MERCEDES, MERCEDES) == 0.0

    def test_symmetry_and_triangle(self):
        F, G, H = (random_frame(3, 5) for _ in range(3))
        assert frame_norm_distance(F, G) == pytest.approx(
            frame_norm_distance(G, F), abs=1e-12)
        assert (frame_norm_distance(F, H)
                <= frame_norm_distance(F, G) + frame_norm_distance(G, H) + 1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(InputError):
            frame_norm_distance(MERCEDES, random_frame(2, 4))

    def test_single_column_perturbation(self):
        G = Frame(dim=2, matrix=MERCEDES.matrix + np.array([[0.25, 0, 0], [0, 0, 0]]))
        assert frame_norm_distance(MERCEDES, G) == pytest.approx(0.25, abs=1e-12)


class TestKernelProjection:
    def test_projection_lands_in_kernel(self):
        F = random_frame(3, 7)
        M = rng.standard_normal((7, 3)) + 1j * rng.standard_normal((7, 3))
        P = project_onto_synthesis_kernel(F, M)
        assert operator_norm(synthesis_matrix(F) @ P) < 1e-9

    def test_projection_is_idempotent(self):
        F = random_frame(3, 7)
        M = rng.standard_normal((7, 3)) + 1j * rng.standard_normal((7, 3))
        P1 = project_onto_synthesis_kernel(F, M)
        P2 = project_onto_synthesis_kernel(F, P1)
        assert operator_norm(P1 - P2) < 1e-10

    def test_analysis_range_basis_shape(self):
        F = random_frame(3, 7)
        Q = analysis_range_basis(F)
        assert Q.shape == (7, 3)
        assert operator_norm(adjoint(Q) @ Q - np.eye(3)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 4), extra=st.integers(0, 4), data=st.data())
def test_bounds_bracket_every_rayleigh_quotient(d, extra, data):
    seed = data.draw(st.integers(0, 2**31 - 1))
    r = np.random.default_rng(seed)
    F = Frame(dim=d, matrix=r.standard_normal((d, d + extra))
              + 1j * r.standard_normal((d, d + extra)))
    b = frame_bounds(F)
    f = r.standard_normal(d) + 1j * r.standard_normal(d)
    if np.linalg.norm(f) < 1e-6:
        return
    energy = float(np.sum(np.abs(analysis_matrix(F) @ f) ** 2))
    nf2 = float(np.real(np.vdot(f, f)))
    assert b.lower_opt * nf2 <= energy + 1e-8 * max(1.0, energy)
    assert energy <= b.upper_opt * nf2 + 1e-8 * max(1.0, energy)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1))
def test_excess_equals_kernel_dimension(seed):
    r = np.random.default_rng(seed)
    d = int(r.integers(1, 5))
    N = d + int(r.integers(0, 5))
    F = Frame(dim=d, matrix=r.standard_normal((d, N)) + 1j * r.standard_normal((d, N)))
    if not is_frame(F):
        return
    assert excess(F) == N - d
