import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from lielcs import catalog
from lielcs.jordan import (
    ClusteringError,
    classify_operator,
    contraction_constants,
    dynamical_split,
    jordan_decompose,
    verify_grading,
)


def _comm(X, Y):
    return X @ Y - Y @ X


def _check_parts(A, tol=1e-8):
    jd = jordan_decompose(A)
    E, H, N = jd.elliptic, jd.hyperbolic, jd.nilpotent
    n = A.shape[0]
    scale = max(1.0, np.linalg.norm(A))
    assert np.max(np.abs(E + H + N - A)) < tol * scale
    for X, Y in ((E, H), (E, N), (H, N)):
        assert np.max(np.abs(_comm(X, Y))) < tol * scale**2
    assert np.max(np.abs(np.linalg.matrix_power(N, n))) < tol * scale**n
    assert np.max(np.abs(np.linalg.eigvals(H).imag)) < 1e-6
    assert np.max(np.abs(np.linalg.eigvals(E).real)) < 1e-6
    return jd


@settings(max_examples=60)
@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_random_reconstruction(seed, n):
    A = np.random.default_rng(seed).uniform(-2, 2, (n, n))
    _check_parts(A)


def _sympy_parts(M):
    """Semisimple and nilpotent parts from the exact Jordan form."""
    P, J = sp.Matrix(M).jordan_form()
    D = sp.diag(*[J[i, i] for i in range(J.shape[0])])
    S = P * D * P.inv()
    return np.array(S.evalf(), dtype=complex).real, np.array((sp.Matrix(M) - S).evalf(), dtype=complex).real


@pytest.mark.parametrize(
    "M",
    [
        [[1, 1], [0, 1]],
        [[2, 1, 0], [0, 2, 0], [0, 0, -1]],
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]],
        [[1, -2, 1, 0], [2, 1, 0, 1], [0, 0, 1, -2], [0, 0, 2, 1]],
        [[3, 1, 2], [0, 3, -1], [0, 0, -2]],
    ],
)
def test_semisimple_part_matches_exact_jordan_form(M):
    A = np.array(M, dtype=float)
    jd = _check_parts(A)
    S, N = _sympy_parts(M)
    assert np.allclose(jd.semisimple, S, atol=1e-8)
    assert np.allclose(jd.nilpotent, N, atol=1e-8)


def test_unipotent_example():
    jd = jordan_decompose([[1.0, 1.0], [0.0, 1.0]])
    assert np.allclose(jd.hyperbolic, np.eye(2))
    assert np.allclose(jd.nilpotent, [[0, 1], [0, 0]])
    assert np.allclose(jd.elliptic, 0)
    assert classify_operator([[1.0, 1.0], [0.0, 1.0]]) == "mixed"


@pytest.mark.parametrize(
    "M, kind",
    [
        ([[0, -1], [1, 0]], "elliptic"),
        ([[2, 0], [0, -1]], "hyperbolic"),
        ([[0, 1], [0, 0]], "nilpotent"),
        ([[1, -1], [1, 1]], "semisimple"),
        ([[0, 0], [0, 0]], "zero"),
    ],
)
def test_classify_operator(M, kind):
    assert classify_operator(np.array(M, dtype=float)) == kind


def test_near_degenerate_spectrum_raises():
    with pytest.raises(ClusteringError) as err:
        jordan_decompose(np.diag([1.0, 1.0 + 3e-7]))
    assert len(err.value.eigenvalues) == 2


def test_uniqueness_under_similarity(rng):
    # parts transform covariantly under change of basis
    A = rng.uniform(-2, 2, (5, 5))
    P = rng.normal(size=(5, 5)) + 3 * np.eye(5)
    B = P @ A @ np.linalg.inv(P)
    ja, jb = jordan_decompose(A), jordan_decompose(B)
    Pi = np.linalg.inv(P)
    for X, Y in ((ja.elliptic, jb.elliptic), (ja.hyperbolic, jb.hyperbolic), (ja.nilpotent, jb.nilpotent)):
        assert np.allclose(P @ X @ Pi, Y, atol=1e-7)


def test_splitting_dims():
    s = dynamical_split(np.diag([-1.0, -1.0, 0.0]))
    assert s.dims == {"plus": 0, "zero": 1, "minus": 2}
    assert s.lambda_min_abs == pytest.approx(1.0)
    s = dynamical_split(np.diag([2.0, 0.0, -2.0]))
    assert s.dims == {"plus": 1, "zero": 1, "minus": 1}


@given(st.integers(0, 2**31 - 1))
def test_oblique_projectors_sum_to_identity(seed):
    A = np.random.default_rng(seed).uniform(-2, 2, (4, 4))
    P = dynamical_split(A, with_constants=False).oblique_projectors()
    assert np.allclose(P["plus"] + P["zero"] + P["minus"], np.eye(4), atol=1e-8)
    for key in P:
        assert np.allclose(P[key] @ A, A @ P[key], atol=1e-7)


@pytest.mark.parametrize(
    "A",
    [
        np.diag([-1.0, -1.0, 0.0]),
        np.array([[-1.0, 10.0], [0.0, -1.0]]),
        np.array([[-0.5, 2.0, 0.0], [-2.0, -0.5, 0.0], [0.0, 0.0, 3.0]]),
    ],
)
def test_contraction_bound_holds(A):
    split = dynamical_split(A)
    c, lam = contraction_constants(split, A)
    Q = split.minus.basis_matrix
    for t in np.linspace(0, 30, 3001):
        norm = np.linalg.norm(Q.T @ expm(t * A) @ Q, 2)
        assert norm <= np.exp(-lam * t) / c * (1 + 1e-9)
    assert c <= 1.0 + 1e-12


def test_contraction_with_metric():
    A = np.array([[-1.0, 4.0], [-4.0, -1.0]])
    split = dynamical_split(A)
    M = np.diag([1.0, 4.0])
    c, lam = contraction_constants(split, A, metric=M)
    L = np.linalg.cholesky(M)
    Q = split.minus.basis_matrix
    for t in np.linspace(0, 20, 401):
        R = Q.T @ expm(t * A) @ Q
        assert np.linalg.norm(L.T @ R @ np.linalg.inv(L.T), 2) <= np.exp(-lam * t) / c * (1 + 1e-9)


def test_contraction_needs_stable_part():
    with pytest.raises(ValueError):
        contraction_constants(dynamical_split(np.eye(2)), np.eye(2))


@pytest.mark.parametrize("label, G, D", catalog.derivation_fixtures(), ids=lambda x: x if isinstance(x, str) else "")
def test_grading_on_fixtures(label, G, D):
    ok, worst = verify_grading(G.algebra, D)
    assert ok, (label, worst)
