import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quadhardy.errors import DimensionError, NotFreeError, NotSymplecticError, SingularMatrixError
from quadhardy.hamiltonian import flow, preset
from quadhardy.symplectic import (
    GeneratingFunction, SymplecticMatrix, free_matrix_from_generating, from_blocks,
    generating_from_free, is_free, is_symplectic, random_symplectic, symplectic_form,
    symplectic_inverse,
)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_standard_form_identities(n):
    J = symplectic_form(n)
    assert np.array_equal(J @ J, -np.eye(2 * n))
    assert np.array_equal(J.T, -J)
    assert np.array_equal(np.linalg.inv(J), J.T)


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4), 1e-12)
    for n in (1, 2, 4):
        assert is_symplectic(symplectic_form(n), 1e-12)
    # (S^T J S)[0, 2] = 2
    assert not is_symplectic(np.diag([2.0, 1.0, 1.0, 1.0]), 1e-12)


@pytest.mark.parametrize("shape", [(3, 3), (2, 4), (0, 0)])
def test_bad_dimensions(shape):
    with pytest.raises(DimensionError):
        is_symplectic(np.zeros(shape))


def test_construction_validates():
    with pytest.raises(NotSymplecticError):
        SymplecticMatrix(np.diag([2.0, 1.0]))
    S = SymplecticMatrix(np.diag([2.0, 0.5]))
    assert S.n == 1
    with pytest.raises(ValueError):
        S.entries[0, 0] = 3.0


def test_blocks_and_block_residuals():
    S = random_symplectic(3, 2)
    top = np.hstack([S.A, S.B])
    bottom = np.hstack([S.C, S.D])
    assert np.array_equal(np.vstack([top, bottom]), S.entries)
    assert max(S.block_residuals()) <= 1e-9


def test_inverse_examples():
    np.testing.assert_array_equal(symplectic_inverse(SymplecticMatrix(np.eye(4))).entries, np.eye(4))
    t, m = 1.5, 2.0
    I = np.eye(2)
    S = from_blocks(I, (t / m) * I, np.zeros((2, 2)), I)
    expected = np.block([[I, -(t / m) * I], [np.zeros((2, 2)), I]])
    np.testing.assert_allclose(symplectic_inverse(S).entries, expected, atol=0)


def test_inverse_matches_lu_on_1000_random():
    worst = 0.0
    for seed in range(1000):
        n = 1 + seed % 3
        S = random_symplectic(seed, n, 0.5)
        inv = symplectic_inverse(S).entries
        ref = np.linalg.inv(S.entries)
        worst = max(worst, np.max(np.abs(inv - ref)))
        assert np.max(np.abs(S.entries @ inv - np.eye(2 * n))) <= 10 * S.tol
    assert worst <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.floats(0.05, 1.0))
def test_group_invariants(seed, n, scale):
    S = random_symplectic(seed, n, scale)
    E = S.entries
    J = symplectic_form(n)
    assert np.max(np.abs(E.T @ J @ E - J)) <= S.tol
    assert np.max(np.abs(E @ J @ E.T - J)) <= 10 * S.tol
    assert abs(np.linalg.det(E) - 1.0) <= 1e-8
    free, _ = is_free(S)
    if free:
        Binv = np.linalg.inv(S.B)
        for a in (S.D @ Binv, Binv @ S.A):
            assert np.max(np.abs(a - a.T)) <= 10 * S.tol * max(1.0, np.max(np.abs(a)))


def test_is_free_examples():
    free, d = is_free(flow(preset("free", m=1.0), 1.0).S)
    assert free and d == pytest.approx(1.0, abs=1e-15)
    free, d = is_free(SymplecticMatrix(np.eye(2)))
    assert not free and d == 0.0
    S = flow(preset("oscillator", omega=[1.0, 2.0]), np.pi).S
    assert not is_free(S)[0]


def test_free_matrix_from_generating_examples():
    S = free_matrix_from_generating(GeneratingFunction(0.0, 0.0, 1.0))
    np.testing.assert_array_equal(S.entries, symplectic_form(1))
    t, m = 2.0, 0.5
    S = free_matrix_from_generating(GeneratingFunction(np.zeros((2, 2)), np.zeros((2, 2)), (t / m) * np.eye(2)))
    Z = np.zeros((2, 2))
    np.testing.assert_allclose(S.entries, np.block([[Z, (t / m) * np.eye(2)], [-(m / t) * np.eye(2), Z]]))
    assert is_free(S)[0]


def test_generating_function_validation():
    with pytest.raises(SingularMatrixError):
        GeneratingFunction(0.0, 0.0, 0.0)
    with pytest.raises(NotSymplecticError):
        GeneratingFunction(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2)), np.eye(2))
    with pytest.raises(DimensionError):
        GeneratingFunction(np.zeros((2, 2)), np.zeros((3, 3)), np.eye(2))


def test_generating_function_value():
    W = GeneratingFunction([[1.0]], [[3.0]], [[2.0]])
    x, xp = 0.7, -1.1
    assert W(x, xp) == pytest.approx(0.5 * x * x - x * xp / 2.0 + 1.5 * xp * xp)


def test_generating_from_free_examples():
    W = generating_from_free(SymplecticMatrix(symplectic_form(1)))
    np.testing.assert_array_equal([W.P[0, 0], W.L[0, 0], W.Q[0, 0]], [0.0, 1.0, 0.0])
    # free flow t=2, m=1: A = D = I, B = 2I, so D B^-1 = B^-1 A = I/2,
    # the Hessian blocks of m (x - x')^2 / (2t)
    W = generating_from_free(flow(preset("free", m=1.0, n=2), 2.0).S)
    np.testing.assert_allclose(W.L, 2 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(W.P, 0.5 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(W.Q, 0.5 * np.eye(2), atol=1e-15)
    xs = np.array([0.3, -1.2]), np.array([0.9, 0.4])
    assert W(*xs) == pytest.approx(np.sum((xs[0] - xs[1]) ** 2) / 4.0)
    W = generating_from_free(flow(preset("oscillator", omega=[1.0]), np.pi / 2).S)
    np.testing.assert_allclose([W.P[0, 0], W.L[0, 0], W.Q[0, 0]], [0, 1, 0], atol=1e-15)


def test_generating_from_free_rejects_non_free():
    with pytest.raises(NotFreeError):
        generating_from_free(SymplecticMatrix(np.eye(2)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_generating_round_trips(seed, n):
    rng = np.random.default_rng(seed)
    P = rng.standard_normal((n, n)); P = P + P.T
    Q = rng.standard_normal((n, n)); Q = Q + Q.T
    L = rng.standard_normal((n, n)) + 2 * np.eye(n)
    W = GeneratingFunction(P, Q, L)
    back = generating_from_free(free_matrix_from_generating(W))
    for a, b in ((W.P, back.P), (W.Q, back.Q), (W.L, back.L)):
        assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(a))) * np.linalg.cond(L)

    S = random_symplectic(seed, n)
    if is_free(S)[0] and np.linalg.cond(S.B) < 1e6:
        again = free_matrix_from_generating(generating_from_free(S))
        assert np.max(np.abs(again.entries - S.entries)) <= 1e-9 * np.linalg.cond(S.B)


def test_random_symplectic_determinism_and_limits():
    a = random_symplectic(0, 1, 1.0)
    b = random_symplectic(0, 1, 1.0)
    assert np.array_equal(a.entries, b.entries)
    assert is_symplectic(a.entries, 1e-9)
    assert np.array_equal(random_symplectic(5, 3, 0.0).entries, np.eye(6))
    assert not np.array_equal(random_symplectic(1, 2).entries, random_symplectic(2, 2).entries)


def test_matmul_composes():
    a, b = random_symplectic(1, 2, 0.3), random_symplectic(2, 2, 0.3)
    c = a @ b
    assert isinstance(c, SymplecticMatrix)
    np.testing.assert_allclose(c.entries, a.entries @ b.entries)
